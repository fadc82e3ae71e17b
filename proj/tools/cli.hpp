#ifndef CHURNKIT_CLI_HPP
#define CHURNKIT_CLI_HPP

#include <iosfwd>
#include <string>

#include "churnkit/hazard.hpp"
#include "churnkit/types.hpp"

namespace churnkit::cli {

/// Runs the churnkit command line. Returns 0 on success, 2 on usage
/// errors, 1 on data/convergence/IO errors (with a one-line diagnostic on
/// the error stream).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes a curve as CSV `t,value,ci_lower,ci_upper` (empty fields for
/// absent bounds), one row per step or grid point, sorted by t. Non-empty
/// step curves get a baseline row at t = 0 (value 1 for survival, 0 for
/// cumulative hazard). Numbers use shortest exact formatting, so parsing
/// the file reproduces the curve bit for bit.
void emit_curve(const StepCurve& curve, std::ostream& out);
void emit_curve(const StepCurve& curve, const std::string& path);
void emit_curve(const HazardCurve& curve, std::ostream& out);
void emit_curve(const HazardCurve& curve, const std::string& path);

}  // namespace churnkit::cli

#endif  // CHURNKIT_CLI_HPP
