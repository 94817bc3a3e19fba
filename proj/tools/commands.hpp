#pragma once

#include <stdexcept>
#include <string>

namespace aniso::cli {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kBudget = 3 };

struct Invocation {
    std::string config;  // experiment config for refine / adapt / besov
    std::string mesh;    // mesh text file for validate / nodes / export
    std::string out = ".";
    std::string format = "text";  // export
    int r1 = 2, r2 = 2;           // nodes
    int threads = -1;             // -1: use the config or all cores
};

// Usage errors that should exit with kUsage.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_refine(const Invocation& inv);
int cmd_adapt(const Invocation& inv);
int cmd_validate(const Invocation& inv);
int cmd_nodes(const Invocation& inv);
int cmd_besov(const Invocation& inv);
int cmd_export(const Invocation& inv);

}  // namespace aniso::cli
