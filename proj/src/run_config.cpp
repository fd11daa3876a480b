#include "tdcheck/run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tdcheck
{

namespace
{

int to_int( const std::string& s, const std::string& what )
{
    try
    {
        std::size_t used = 0;
        int v = std::stoi( s, &used );
        if( used != s.size() )
            throw std::invalid_argument( s );
        return v;
    }
    catch( const std::exception& )
    {
        throw ConfigError( "bad value '" + s + "' for " + what );
    }
}

void set_constant( RunConfig& c, const std::string& name, const std::string& value )
{
    if( name == "N" )
        c.nodes = to_int( value, name );
    else if( name == "K" )
        c.bounds.pending = to_int( value, name );
    else if( name == "C" )
        c.bounds.counter = to_int( value, name );
    else if( name == "Q" )
        c.bounds.token_q = to_int( value, name );
    else if( name == "MaxDepth" || name == "max_depth" )
        c.bounds.max_depth = to_int( value, name );
    else
        throw ConfigError( "unknown constant '" + name + "'" );
}

bool is_section( const std::string& w )
{
    static const std::vector<std::string> names{
        "SPECIFICATION", "CONSTANT", "CONSTANTS",         "BOUNDS",     "INVARIANT", "INVARIANTS",
        "PROPERTY",      "PROPERTIES", "ACTION_INVARIANT", "ACTION_INVARIANTS", "MUTANT",    "SEED" };
    return std::find( names.begin(), names.end(), w ) != names.end();
}

} // namespace

void RunConfig::merge_defaults( const RunConfig& o )
{
    if( !spec )
        spec = o.spec;
    if( !nodes )
        nodes = o.nodes;
    for( auto [mine, theirs] : { std::pair{ &bounds.pending, &o.bounds.pending },
                                 std::pair{ &bounds.counter, &o.bounds.counter },
                                 std::pair{ &bounds.token_q, &o.bounds.token_q },
                                 std::pair{ &bounds.max_depth, &o.bounds.max_depth } } )
        if( !*mine )
            *mine = *theirs;
    if( invariants.empty() )
        invariants = o.invariants;
    if( action_invariants.empty() )
        action_invariants = o.action_invariants;
    if( properties.empty() )
        properties = o.properties;
    if( !mutant )
        mutant = o.mutant;
    if( !seed )
        seed = o.seed;
}

RunConfig parse_config_text( std::string_view text )
{
    // Tokenize, dropping \* line comments and treating '=' and ',' as blanks
    // inside assignments.
    std::vector<std::string> words;
    std::istringstream lines{ std::string( text ) };
    std::string line;
    while( std::getline( lines, line ) )
    {
        if( auto c = line.find( "\\*" ); c != std::string::npos )
            line.erase( c );
        for( char& ch : line )
            if( ch == '=' || ch == ',' )
                ch = ' ';
        std::istringstream in{ line };
        for( std::string w; in >> w; )
            words.push_back( w );
    }

    RunConfig c;
    std::string section;
    for( std::size_t i = 0; i < words.size(); ++i )
    {
        const auto& w = words[ i ];
        if( is_section( w ) )
        {
            section = w;
            continue;
        }
        if( section.empty() )
            throw ConfigError( "config value '" + w + "' outside any section" );
        if( section == "SPECIFICATION" )
            c.spec = w;
        else if( section == "CONSTANT" || section == "CONSTANTS" || section == "BOUNDS" )
        {
            if( i + 1 >= words.size() || is_section( words[ i + 1 ] ) )
                throw ConfigError( "constant '" + w + "' has no value" );
            set_constant( c, w, words[ i + 1 ] );
            ++i;
        }
        else if( section == "INVARIANT" || section == "INVARIANTS" )
            c.invariants.push_back( w );
        else if( section == "ACTION_INVARIANT" || section == "ACTION_INVARIANTS" )
            c.action_invariants.push_back( w );
        else if( section == "PROPERTY" || section == "PROPERTIES" )
            c.properties.push_back( w );
        else if( section == "MUTANT" )
            c.mutant = w;
        else if( section == "SEED" )
        {
            try
            {
                c.seed = std::stoull( w );
            }
            catch( const std::exception& )
            {
                throw ConfigError( "bad seed '" + w + "'" );
            }
        }
    }
    return c;
}

RunConfig parse_config_json( const json& j )
{
    if( !j.is_object() )
        throw ConfigError( "JSON config must be an object" );
    RunConfig c;
    try
    {
        if( j.contains( "spec" ) )
            c.spec = j.at( "spec" ).get<std::string>();
        for( const char* k : { "N", "K", "C", "Q", "max_depth" } )
            if( j.contains( k ) )
                set_constant( c, k, std::to_string( j.at( k ).get<int>() ) );
        if( j.contains( "bounds" ) )
            for( const char* k : { "K", "C", "Q", "max_depth" } )
                if( j.at( "bounds" ).contains( k ) )
                    set_constant( c, k, std::to_string( j.at( "bounds" ).at( k ).get<int>() ) );
        if( j.contains( "invariants" ) )
            c.invariants = j.at( "invariants" ).get<std::vector<std::string>>();
        if( j.contains( "action_invariants" ) )
            c.action_invariants = j.at( "action_invariants" ).get<std::vector<std::string>>();
        if( j.contains( "properties" ) )
            c.properties = j.at( "properties" ).get<std::vector<std::string>>();
        if( j.contains( "mutant" ) && !j.at( "mutant" ).is_null() )
            c.mutant = j.at( "mutant" ).get<std::string>();
        if( j.contains( "seed" ) )
            c.seed = j.at( "seed" ).get<std::uint64_t>();
    }
    catch( const json::exception& e )
    {
        throw ConfigError( std::string( "bad JSON config: " ) + e.what() );
    }
    return c;
}

RunConfig load_config( const std::filesystem::path& path )
{
    std::ifstream in{ path };
    if( !in )
        throw ConfigError( "cannot read config file " + path.string() );
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    auto first = text.find_first_not_of( " \t\r\n" );
    if( first != std::string::npos && text[ first ] == '{' )
    {
        try
        {
            return parse_config_json( json::parse( text ) );
        }
        catch( const json::parse_error& e )
        {
            throw ConfigError( "config file " + path.string() + ": " + e.what() );
        }
    }
    return parse_config_text( text );
}

int default_workers()
{
    if( const char* env = std::getenv( "TDCHECK_WORKERS" ) )
    {
        try
        {
            int w = std::stoi( env );
            if( w >= 0 )
                return w;
        }
        catch( const std::exception& )
        {
        }
        throw ConfigError( "TDCHECK_WORKERS must be a non-negative integer" );
    }
    return 0;
}

} // namespace tdcheck
