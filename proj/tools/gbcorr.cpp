#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "gbcorr/commands.hpp"
#include "gbcorr/config.hpp"

using namespace gbcorr;

namespace {

struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    std::string suite = "all";
};

void add_common(CLI::App* sub, Invocation& inv)
{
    sub->add_option("--config", inv.config_path, "flat key = value config file");
    for (const auto& key : config_keys())
        sub->add_option_function<std::string>(
            "--" + key, [&inv, key](const std::string& v) { inv.overrides[key] = v; }, "config key " + key);
}

RunConfig effective_config(const Invocation& inv)
{
    RunConfig cfg;
    if (!inv.config_path.empty()) cfg = load_config(inv.config_path, cfg);
    // flags after the file, in key order
    for (const auto& key : config_keys()) {
        auto it = inv.overrides.find(key);
        if (it != inv.overrides.end()) apply_setting(cfg, key, it->second);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gbcorr: correlation energy of the mean-field electron gas on the torus"};
    app.require_subcommand(1);
    Invocation inv;
    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {
        {"compute", "per-k_F reports with per-orbit breakdown"},
        {"sweep", "summary series over kf_list"},
        {"fit", "asymptotic fit of a series (bos, ex, budget_ratio)"},
        {"verify-bounds", "scalar bound and scaling checks"},
        {"verify-fock", "second-quantized identities on finite Fock vectors"},
        {"verify-onebody", "one-body operator identities and bounds"},
        {"verify", "run a named suite (--suite bounds|fock|onebody|all)"},
        {"report", "fits and plots from a sweep table"},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : cmds) {
        auto* s = app.add_subcommand(c.name, c.help);
        add_common(s, inv);
        subs[c.name] = s;
    }
    subs["verify"]->add_option("--suite", inv.suite, "bounds, fock, onebody or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    return guarded(
        [&]() -> int {
            const RunConfig cfg = effective_config(inv);
            if (*subs["compute"]) return cmd_compute(cfg, std::cout);
            if (*subs["sweep"]) return cmd_sweep(cfg, std::cout);
            if (*subs["fit"]) return cmd_fit(cfg, std::cout);
            if (*subs["verify-bounds"]) return cmd_verify(cfg, "bounds", std::cout, std::cerr);
            if (*subs["verify-fock"]) return cmd_verify(cfg, "fock", std::cout, std::cerr);
            if (*subs["verify-onebody"]) return cmd_verify(cfg, "onebody", std::cout, std::cerr);
            if (*subs["verify"]) return cmd_verify(cfg, inv.suite, std::cout, std::cerr);
            return cmd_report(cfg, std::cout);
        },
        std::cerr);
}
