#pragma once

#include "tdcheck/check_report.hpp"
#include "tdcheck/sim_runtime.hpp"
#include "tdcheck/trace_validator.hpp"

namespace tdcheck
{

enum class OutputFormat
{
    Text,
    Json,
};

OutputFormat parse_output_format( std::string_view name );

// Field-level differences between two JSON states, as "path: old -> new".
std::vector<std::string> state_diff( const json& before, const json& after );
std::string flat_state( const json& state );

std::string render( const CheckReport& report, OutputFormat format );
std::string render( const ValidationVerdict& verdict, OutputFormat format );
std::string render( const SimSummary& summary, OutputFormat format );

} // namespace tdcheck
