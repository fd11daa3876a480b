#include "tdcheck/check_report.hpp"

namespace tdcheck
{

namespace
{

json steps_to_json( const std::vector<TraceStep>& steps )
{
    json arr = json::array();
    for( const auto& s : steps )
    {
        json j{ { "state", s.state }, { "encoding", s.encoding } };
        if( s.label )
        {
            auto l = label_to_json( *s.label );
            j[ "label" ] = l[ "label" ];
            j[ "args" ] = l[ "args" ];
        }
        else
        {
            j[ "label" ] = nullptr;
            j[ "args" ] = json::array();
        }
        arr.push_back( std::move( j ) );
    }
    return arr;
}

std::vector<TraceStep> steps_from_json( const json& arr )
{
    std::vector<TraceStep> out;
    for( const auto& j : arr )
    {
        TraceStep s;
        s.state = j.at( "state" );
        s.encoding = j.value( "encoding", "" );
        if( j.contains( "label" ) && !j.at( "label" ).is_null() )
            s.label = label_from_json( j );
        out.push_back( std::move( s ) );
    }
    return out;
}

} // namespace

std::string_view verdict_name( Verdict v )
{
    switch( v )
    {
    case Verdict::Pass:
        return "pass";
    case Verdict::Violation:
        return "violation";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

Verdict parse_verdict( std::string_view name )
{
    if( name == "pass" )
        return Verdict::Pass;
    if( name == "violation" )
        return Verdict::Violation;
    if( name == "inconclusive" )
        return Verdict::Inconclusive;
    throw ConfigError( "unknown verdict '" + std::string( name ) + "'" );
}

int CheckReport::exit_code() const
{
    switch( verdict )
    {
    case Verdict::Pass:
        return exit_pass;
    case Verdict::Violation:
        return exit_violation;
    case Verdict::Inconclusive:
        return exit_inconclusive;
    }
    return exit_inconclusive;
}

json CheckReport::to_json() const
{
    json j;
    j[ "schema" ] = report_schema;
    j[ "check" ] = check;
    j[ "spec" ] = spec;
    j[ "N" ] = nodes;
    j[ "mutant" ] = mutant ? json( *mutant ) : json( nullptr );
    j[ "bounds" ] = bounds.to_json();
    j[ "properties" ] = properties;
    j[ "verdict" ] = verdict_name( verdict );
    j[ "distinct_states" ] = distinct_states;
    j[ "diameter" ] = diameter;
    j[ "violated_property" ] = violated_property ? json( *violated_property ) : json( nullptr );
    j[ "trace" ] = steps_to_json( trace );
    j[ "cycle" ] = steps_to_json( cycle );
    j[ "wall_ms" ] = wall_ms;
    j[ "soundness" ] = soundness == Soundness::Exact ? "exact" : "probabilistic";
    j[ "message" ] = message;
    j[ "stats" ] = stats;
    return j;
}

CheckReport CheckReport::from_json( const json& j )
{
    if( j.value( "schema", "" ) != report_schema )
        throw ConfigError( "not a check report" );
    CheckReport r;
    r.check = j.at( "check" ).get<std::string>();
    r.spec = j.at( "spec" ).get<std::string>();
    r.nodes = j.at( "N" ).get<int>();
    if( !j.at( "mutant" ).is_null() )
        r.mutant = j.at( "mutant" ).get<std::string>();
    const auto& b = j.at( "bounds" );
    if( b.contains( "K" ) )
        r.bounds.pending = b.at( "K" ).get<int>();
    if( b.contains( "C" ) )
        r.bounds.counter = b.at( "C" ).get<int>();
    if( b.contains( "Q" ) )
        r.bounds.token_q = b.at( "Q" ).get<int>();
    if( b.contains( "max_depth" ) )
        r.bounds.max_depth = b.at( "max_depth" ).get<int>();
    r.properties = j.at( "properties" ).get<std::vector<std::string>>();
    r.verdict = parse_verdict( j.at( "verdict" ).get<std::string>() );
    r.distinct_states = j.at( "distinct_states" ).get<std::uint64_t>();
    r.diameter = j.at( "diameter" ).get<int>();
    if( !j.at( "violated_property" ).is_null() )
        r.violated_property = j.at( "violated_property" ).get<std::string>();
    r.trace = steps_from_json( j.at( "trace" ) );
    r.cycle = steps_from_json( j.at( "cycle" ) );
    r.wall_ms = j.at( "wall_ms" ).get<double>();
    r.soundness = j.at( "soundness" ) == "exact" ? Soundness::Exact : Soundness::Probabilistic;
    r.message = j.value( "message", "" );
    r.stats = j.value( "stats", json::object() );
    return r;
}

} // namespace tdcheck
