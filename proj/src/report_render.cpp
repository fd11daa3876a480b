#include "tdcheck/report_render.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace tdcheck
{

namespace
{

void flatten( const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out )
{
    if( j.is_object() )
    {
        for( auto it = j.begin(); it != j.end(); ++it )
            flatten( it.value(), path.empty() ? it.key() : path + "." + it.key(), out );
    }
    else if( j.is_array() )
    {
        for( std::size_t i = 0; i < j.size(); ++i )
            flatten( j[ i ], path + "[" + std::to_string( i ) + "]", out );
    }
    else
        out.emplace_back( path, j.is_string() ? j.get<std::string>() : j.dump() );
}

std::string compact( const json& j )
{
    if( j.is_string() )
        return j.get<std::string>();
    if( j.is_array() )
    {
        std::string s = "[";
        for( std::size_t i = 0; i < j.size(); ++i )
            s += ( i ? "," : "" ) + compact( j[ i ] );
        return s + "]";
    }
    if( j.is_object() )
    {
        std::string s = "{";
        bool first = true;
        for( auto it = j.begin(); it != j.end(); ++it, first = false )
            s += ( first ? "" : "," ) + it.key() + ":" + compact( it.value() );
        return s + "}";
    }
    return j.dump();
}

std::string step_label( const TraceStep& s )
{
    return s.label ? s.label->to_string() : "<initial>";
}

void render_steps( std::ostream& out, const std::vector<TraceStep>& steps, const json* previous,
                   std::size_t first_index )
{
    for( std::size_t i = 0; i < steps.size(); ++i )
    {
        const auto& st = steps[ i ];
        out << "  " << std::setw( 4 ) << first_index + i << "  " << std::left << std::setw( 20 ) << step_label( st )
            << std::right;
        if( !previous )
            out << "  " << flat_state( st.state );
        else
        {
            auto diff = state_diff( *previous, st.state );
            if( diff.empty() )
                out << "  (unchanged)";
            for( std::size_t k = 0; k < diff.size(); ++k )
                out << ( k ? ", " : "  " ) << diff[ k ];
        }
        out << '\n';
        previous = &st.state;
    }
}

} // namespace

OutputFormat parse_output_format( std::string_view name )
{
    if( name == "text" )
        return OutputFormat::Text;
    if( name == "json" )
        return OutputFormat::Json;
    throw ConfigError( "unknown output format '" + std::string( name ) + "'" );
}

std::vector<std::string> state_diff( const json& before, const json& after )
{
    std::vector<std::pair<std::string, std::string>> a, b;
    flatten( before, "", a );
    flatten( after, "", b );
    std::vector<std::string> out;
    for( const auto& [path, value] : b )
    {
        auto it = std::find_if( a.begin(), a.end(), [&]( const auto& p ) { return p.first == path; } );
        if( it == a.end() )
            out.push_back( "*" + path + ": " + value );
        else if( it->second != value )
            out.push_back( "*" + path + ": " + it->second + " -> " + value );
    }
    return out;
}

std::string flat_state( const json& state )
{
    if( !state.is_object() )
        return compact( state );
    std::string s;
    for( auto it = state.begin(); it != state.end(); ++it )
        s += ( s.empty() ? "" : " " ) + it.key() + "=" + compact( it.value() );
    return s;
}

std::string render( const CheckReport& r, OutputFormat format )
{
    if( format == OutputFormat::Json )
        return r.to_json().dump( 2 ) + "\n";
    std::ostringstream out;
    out << "verdict: " << verdict_name( r.verdict );
    if( r.violated_property )
        out << " (" << *r.violated_property << ")";
    out << '\n';
    out << "check: " << r.check << "  spec: " << r.spec << "  N=" << r.nodes;
    if( r.mutant )
        out << "  mutant: " << *r.mutant;
    out << '\n';
    if( !r.properties.empty() )
    {
        out << "properties:";
        for( const auto& p : r.properties )
            out << ' ' << p;
        out << '\n';
    }
    auto b = r.bounds.to_json();
    if( !b.empty() )
    {
        out << "bounds:";
        for( auto it = b.begin(); it != b.end(); ++it )
            out << ' ' << it.key() << '=' << it.value().dump();
        out << '\n';
    }
    out << "distinct states: " << r.distinct_states << '\n';
    out << "diameter: " << r.diameter << '\n';
    out << "wall ms: " << std::fixed << std::setprecision( 1 ) << r.wall_ms << '\n';
    out << "soundness: " << ( r.soundness == Soundness::Exact ? "exact" : "probabilistic" ) << '\n';
    for( auto it = r.stats.begin(); it != r.stats.end(); ++it )
        out << it.key() << ": " << compact( it.value() ) << '\n';
    if( !r.message.empty() )
        out << "note: " << r.message << '\n';
    if( !r.trace.empty() )
    {
        out << ( r.verdict == Verdict::Violation ? "counterexample" : "trace" ) << " (" << r.trace.size()
            << " states):\n";
        render_steps( out, r.trace, nullptr, 0 );
    }
    if( !r.cycle.empty() )
    {
        out << "cycle:\n";
        render_steps( out, r.cycle, &r.trace.back().state, r.trace.size() );
    }
    return out.str();
}

std::string render( const ValidationVerdict& v, OutputFormat format )
{
    if( format == OutputFormat::Json )
        return v.to_json().dump( 2 ) + "\n";
    std::ostringstream out;
    if( v.accepted )
    {
        out << "trace accepted (" << v.checked_events << " events)\n";
        return out.str();
    }
    out << "trace rejected at index " << *v.failing_index << ": " << reject_reason_name( *v.reason ) << '\n';
    if( !v.message.empty() )
        out << "  " << v.message << '\n';
    if( !v.expected_successors.empty() )
    {
        out << "expected one of:\n";
        for( const auto& s : v.expected_successors )
        {
            out << "  ";
            if( s.contains( "label" ) )
                out << label_from_json( s ).to_string() << "  " << flat_state( s.at( "state" ) );
            else
                out << flat_state( s );
            out << '\n';
        }
    }
    return out.str();
}

std::string render( const SimSummary& s, OutputFormat format )
{
    if( format == OutputFormat::Json )
        return s.to_json().dump( 2 ) + "\n";
    std::ostringstream out;
    out << "runs: " << s.runs.size() << '\n';
    out << std::fixed << std::setprecision( 3 );
    out << "detection rate: " << s.detection_rate << '\n';
    out << "mean events to detection: " << s.mean_events_to_detection << '\n';
    out << "mean rounds after termination: " << s.mean_rounds_after_termination << '\n';
    out << "max rounds after termination: " << s.max_rounds_after_termination << '\n';
    return out.str();
}

} // namespace tdcheck
