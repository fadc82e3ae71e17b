#ifndef CHURNKIT_CHURNKIT_HPP
#define CHURNKIT_CHURNKIT_HPP

#include "churnkit/compare.hpp"
#include "churnkit/event_table.hpp"
#include "churnkit/hazard.hpp"
#include "churnkit/ingest.hpp"
#include "churnkit/metrics.hpp"
#include "churnkit/nonparam.hpp"
#include "churnkit/numerics.hpp"
#include "churnkit/parametric.hpp"
#include "churnkit/sim.hpp"
#include "churnkit/types.hpp"

#endif  // CHURNKIT_CHURNKIT_HPP
