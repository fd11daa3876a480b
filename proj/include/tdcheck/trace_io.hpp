#pragma once

// Behavior trace files: the spec instance, an initial state, and the events
// that follow it, each with its post-state.

#include "tdcheck/kernel.hpp"

#include <filesystem>

namespace tdcheck
{

inline constexpr std::string_view trace_schema = "tdcheck.trace/1";

struct TraceEvent
{
    std::optional<Label> label;  // absent in label-free traces
    json state;
};

struct Trace
{
    SpecInstance instance;
    json config = json::object();  // producer settings, kept verbatim
    json initial;
    std::vector<TraceEvent> events;
    json verdict = json::object();

    [[nodiscard]] std::size_t states() const { return events.size() + 1; }
    [[nodiscard]] const json& state_at( std::size_t index ) const
    {
        return index == 0 ? initial : events.at( index - 1 ).state;
    }

    [[nodiscard]] json to_json() const;
    static Trace from_json( const json& j );
};

void write_trace( const Trace& trace, const std::filesystem::path& path );
Trace read_trace( const std::filesystem::path& path );

// Same behavior with every label dropped.
Trace strip_labels( Trace trace );

} // namespace tdcheck
