#pragma once

// Discrete-event execution of Safra's algorithm. A seeded scheduler picks
// one enabled transition per event, weighted by kind, until termination is
// detected or the event cap is hit.

#include "tdcheck/safra_spec.hpp"
#include "tdcheck/trace_io.hpp"

namespace tdcheck
{

struct SimConfig
{
    int nodes = 5;
    std::uint64_t seed = 1;
    std::uint64_t max_events = 100'000;
    double send_probability = 0.3;       // spread over the N destinations
    double terminate_probability = 0.2;
    double token_priority = 1.0;         // InitiateProbe and PassToken
    std::optional<std::string> mutant;
    std::optional<std::string> token_start;

    void validate() const;
    [[nodiscard]] json to_json() const;
    static SimConfig from_json( const json& j );
};

struct SimOutcome
{
    bool detected = false;
    std::optional<std::uint64_t> detected_at;    // event index, 1-based
    std::optional<std::uint64_t> terminated_at;  // first event after which terminated holds (0: initially)
    std::uint64_t events = 0;
    // InitiateProbe events after terminated first held.
    std::uint64_t rounds_after_termination = 0;

    [[nodiscard]] json to_json() const;
};

struct SimRun
{
    Trace trace;
    SimOutcome outcome;
};

SimRun run_simulation( const SimConfig& config );

struct SimSummary
{
    std::vector<SimOutcome> runs;
    double detection_rate = 0;
    double mean_events_to_detection = 0;
    double mean_rounds_after_termination = 0;
    std::uint64_t max_rounds_after_termination = 0;

    [[nodiscard]] json to_json() const;
};

// One run per seed, all other settings from `base`. Runs execute in
// parallel; each run is single-threaded and deterministic.
SimSummary run_batch( const SimConfig& base, const std::vector<std::uint64_t>& seeds, int workers = 0 );

} // namespace tdcheck
