// Command-line driver: one subcommand per pipeline stage.
//   wgtorus <subcommand> --config <path> [--out <dir>] [--h-sweep v1,v2,...]
// Exit codes: 0 success, 2 config error, 3 numerical/regime error, 4 audit failure.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgtorus/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"whispering-gallery quasimodes in a solid torus of revolution"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<double> h_sweep;

    const std::vector<std::string> names = {"curve",  "spectrum",  "mode1d",     "mode2d",
                                            "mode3d", "residual",  "oracle",     "audit",
                                            "billiard2d", "billiard3d", "caustic", "all"};
    for (const auto& n : names) {
        auto* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "configuration file (key = value lines)");
        sub->add_option("--out", out_dir, "output directory override");
        if (n == "residual")
            sub->add_option("--h-sweep", h_sweep, "comma-separated h values")->delimiter(',');
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        wgtorus::RunConfig cfg =
            config_path.empty() ? wgtorus::RunConfig{} : wgtorus::parse_config(config_path);
        if (config_path.empty()) cfg.finalize();
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        wgtorus::PipelineContext ctx(cfg);
        return wgtorus::run_subcommand(cmd, ctx, h_sweep);
    } catch (const wgtorus::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wgtorus::audit_error& e) {
        std::cerr << "audit failure: " << e.what() << "\n";
        return 4;
    } catch (const wgtorus::numeric_error& e) {
        std::cerr << "numerical error [" << cmd << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error [" << cmd << "]: " << e.what() << "\n";
        return 3;
    }
}
