#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gbcorr/potential.hpp"

namespace gbcorr {

struct RunConfig {
    std::vector<double> kf_list{1.0};
    double beta = 1.0;
    PotentialModel potential = PotentialModel::coulomb(1.0);
    double kmax_factor_bos = 4.0;
    double kmax_factor_ex = 2.0;
    double quad_tol = 1e-11;
    double epsilon = 0.1;
    int threads = 1;
    std::string output_dir = "gbcorr_out";
    std::vector<std::string> formats{"csv", "json", "svg"};
    bool with_trace = true;
    bool with_eb6 = true;

    // fit
    std::string series = "bos";
    std::string fit_input;

    // verification suites
    double fock_kf = 1.0;
    std::string fock_arithmetic = "both";
    std::uint64_t fock_seed = 12345;
    int fock_trials = 4;
    double trend_limit = 1.0;
    double orbit_factor = 2.0;
    int onebody_instances = 100;
    std::uint64_t onebody_seed = 7;

    bool wants(const std::string& format) const;
};

// every accepted key, in file order
const std::vector<std::string>& config_keys();

// sets one key; ValidationError names the key on a bad key or value
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// flat "key = value" text, '#' starts a comment
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// invariants checked after all settings are applied
void validate_config(const RunConfig& cfg);

// round-trippable listing of the effective settings
std::map<std::string, std::string> describe(const RunConfig& cfg);

}  // namespace gbcorr
