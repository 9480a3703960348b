#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace ldlab::cli {

enum class Output { text, json };

struct Config {
    std::filesystem::path cache_dir;
    unsigned max_k = 16;
    std::uint64_t fuel = 100'000;
    Output output = Output::text;
    std::uint64_t seed = 1;
    bool force = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_exhausted = 2;

// argv[0] excluded
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// `verify all`; returns true when every check passes
bool verify_all(const Config& cfg, std::ostream& out);

} // namespace ldlab::cli
