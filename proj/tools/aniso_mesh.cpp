#include "commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <functional>
#include <map>

using namespace aniso::cli;

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("aniso-mesh");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("ANISO_MESH_LOG");
    const std::string level = env ? env : "info";
    if (level == "error")
        spdlog::set_level(spdlog::level::err);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        spdlog::set_level(spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Anisotropic space-time mesh refinement and approximation"};
    app.require_subcommand(1);
    Invocation inv;

    const std::map<std::string, std::function<int(const Invocation&)>> handlers = {
        {"refine", cmd_refine}, {"adapt", cmd_adapt},   {"validate", cmd_validate},
        {"nodes", cmd_nodes},   {"besov", cmd_besov},   {"export", cmd_export},
    };
    const std::map<std::string, std::string> help = {
        {"refine", "scripted marking policy, writes complexity.csv and mesh.txt"},
        {"adapt", "greedy adaptation or rate study, writes ledger, mesh, solution and rate_study.csv"},
        {"validate", "check a mesh file; exit 2 on violations"},
        {"nodes", "classify the Lagrange nodes of a mesh file"},
        {"besov", "discrete Besov seminorm and multiscale ladder of the configured function"},
        {"export", "re-export a mesh file as canonical text or VTK"},
    };
    for (const auto& [name, fn] : handlers) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        const bool needs_config = name == "refine" || name == "adapt" || name == "besov";
        if (needs_config)
            sub->add_option("--config", inv.config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
        else
            sub->add_option("mesh", inv.mesh, "mesh text file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", inv.out, "output directory");
        sub->add_option("--threads", inv.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        if (name == "nodes") {
            sub->add_option("--r1", inv.r1, "temporal order")->check(CLI::PositiveNumber);
            sub->add_option("--r2", inv.r2, "spatial order")->check(CLI::PositiveNumber);
        }
        if (name == "export") sub->add_option("--format", inv.format, "text or vtk")->check(CLI::IsMember({"text", "vtk"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return handlers.at(name)(inv);
    } catch (const UsageError& e) {
        spdlog::error("{}", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        // malformed configs and mesh files are validation failures
        spdlog::error("{}", e.what());
        return kValidation;
    }
}
