#pragma once

// Settings shared by the command-line front end and its configuration files.
// A config file is either JSON or TLC-style sections:
//
//   SPECIFICATION safra
//   CONSTANT N = 3
//   BOUNDS K = 3 C = 3 Q = 9
//   INVARIANTS TypeOK Inv
//   ACTION_INVARIANTS Quiescence
//   PROPERTIES round3
//   MUTANT token-adopts-node-color
//   SEED 7

#include "tdcheck/kernel.hpp"

#include <filesystem>

namespace tdcheck
{

struct RunConfig
{
    std::optional<std::string> spec;
    std::optional<int> nodes;
    Bounds bounds;
    std::vector<std::string> invariants;
    std::vector<std::string> action_invariants;
    std::vector<std::string> properties;
    std::optional<std::string> mutant;
    std::optional<std::uint64_t> seed;

    // Fills every field that is unset here from `other`.
    void merge_defaults( const RunConfig& other );
};

RunConfig parse_config_text( std::string_view text );
RunConfig parse_config_json( const json& j );
RunConfig load_config( const std::filesystem::path& path );

// Worker count from TDCHECK_WORKERS, or 0 (runtime default).
int default_workers();

} // namespace tdcheck
