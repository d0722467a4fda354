#pragma once

#include <iosfwd>
#include <string>

#include "gbcorr/config.hpp"

namespace gbcorr {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2, exit_verification = 3 };

int cmd_compute(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
// suite: bounds, fock, onebody or all
int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out);

// runs body, mapping ValidationError to 1 and NumericalError to 2 with a message on err
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace gbcorr
