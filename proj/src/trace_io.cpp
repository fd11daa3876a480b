#include "tdcheck/trace_io.hpp"

#include <fstream>

namespace tdcheck
{

json Trace::to_json() const
{
    json j;
    j[ "schema" ] = trace_schema;
    j[ "spec" ] = instance.name;
    j[ "N" ] = instance.nodes;
    j[ "mutant" ] = instance.mutant ? json( *instance.mutant ) : json( nullptr );
    if( instance.token_start )
        j[ "token_start" ] = *instance.token_start;
    j[ "config" ] = config;
    j[ "initial" ] = initial;
    json events = json::array();
    for( const auto& e : this->events )
    {
        json ev{ { "state", e.state } };
        if( e.label )
        {
            auto l = label_to_json( *e.label );
            ev[ "label" ] = l[ "label" ];
            ev[ "args" ] = l[ "args" ];
        }
        else
        {
            ev[ "label" ] = nullptr;
            ev[ "args" ] = json::array();
        }
        events.push_back( std::move( ev ) );
    }
    j[ "events" ] = std::move( events );
    j[ "verdict" ] = verdict;
    return j;
}

Trace Trace::from_json( const json& j )
{
    if( !j.is_object() || j.value( "schema", "" ) != trace_schema )
        throw ConfigError( "not a trace file (expected schema " + std::string( trace_schema ) + ")" );
    Trace t;
    t.instance.name = j.at( "spec" ).get<std::string>();
    t.instance.nodes = j.at( "N" ).get<int>();
    if( j.contains( "mutant" ) && !j.at( "mutant" ).is_null() )
        t.instance.mutant = j.at( "mutant" ).get<std::string>();
    if( j.contains( "token_start" ) )
        t.instance.token_start = j.at( "token_start" ).get<std::string>();
    t.instance.validate();
    t.config = j.value( "config", json::object() );
    t.initial = j.at( "initial" );
    for( const auto& ev : j.at( "events" ) )
    {
        TraceEvent e;
        e.state = ev.at( "state" );
        if( ev.contains( "label" ) && !ev.at( "label" ).is_null() )
            e.label = label_from_json( ev );
        t.events.push_back( std::move( e ) );
    }
    t.verdict = j.value( "verdict", json::object() );
    return t;
}

void write_trace( const Trace& trace, const std::filesystem::path& path )
{
    std::ofstream out{ path };
    if( !out )
        throw ConfigError( "cannot write trace file " + path.string() );
    out << trace.to_json().dump( 1 ) << '\n';
}

Trace read_trace( const std::filesystem::path& path )
{
    std::ifstream in{ path };
    if( !in )
        throw ConfigError( "cannot read trace file " + path.string() );
    json j;
    try
    {
        j = json::parse( in );
    }
    catch( const json::parse_error& e )
    {
        throw ConfigError( "trace file " + path.string() + " is not JSON: " + e.what() );
    }
    return Trace::from_json( j );
}

Trace strip_labels( Trace trace )
{
    for( auto& e : trace.events )
        e.label.reset();
    return trace;
}

} // namespace tdcheck
