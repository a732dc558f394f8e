#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>

namespace wclt::cli {

struct RunContext {
    nlohmann::json config;           // effective config (overrides applied)
    std::filesystem::path out_dir;
    int threads = 0;                 // replicate pool size; 0 = library default
    std::string command;
};

// Each command validates its config slice, runs, writes its report files plus
// manifest.json into out_dir, and returns. Errors surface as wclt exceptions
// mapped by the CLI front end (2 config, 3 verdict, 4 numeric).
void run_simulate(const RunContext& ctx);
void run_contraction(const RunContext& ctx);
void run_check(const RunContext& ctx);
void run_clt(const RunContext& ctx);
void run_poisson(const RunContext& ctx);

} // namespace wclt::cli
