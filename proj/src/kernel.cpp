#include "tdcheck/kernel.hpp"

#include <algorithm>
#include <charconv>

namespace tdcheck
{

namespace
{

constexpr std::array<std::string_view, 7> action_names{ "InitiateProbe", "PassToken",         "SendMsg", "RcvMsg",
                                                        "Terminate",     "DetectTermination", "stutter" };

int parse_int( std::string_view s )
{
    while( !s.empty() && s.front() == ' ' )
        s.remove_prefix( 1 );
    while( !s.empty() && s.back() == ' ' )
        s.remove_suffix( 1 );
    int v = 0;
    auto [ptr, ec] = std::from_chars( s.data(), s.data() + s.size(), v );
    if( ec != std::errc{} || ptr != s.data() + s.size() )
        throw ConfigError( "bad integer '" + std::string( s ) + "'" );
    return v;
}

} // namespace

std::string_view action_name( Action a )
{
    return action_names.at( static_cast<std::size_t>( a ) );
}

Action parse_action( std::string_view name )
{
    for( std::size_t i = 0; i < action_names.size(); ++i )
        if( action_names[ i ] == name )
            return static_cast<Action>( i );
    if( name == "Stutter" || name == "stutter" )
        return Action::Stutter;
    throw ConfigError( "unknown action '" + std::string( name ) + "'" );
}

int action_arity( Action a )
{
    switch( a )
    {
    case Action::SendMsg:
        return 2;
    case Action::PassToken:
    case Action::RcvMsg:
    case Action::Terminate:
        return 1;
    default:
        return 0;
    }
}

std::vector<int> Label::arg_list() const
{
    std::vector<int> out;
    for( int k = 0; k < action_arity( action ); ++k )
        out.push_back( args[ k ] );
    return out;
}

std::string Label::to_string() const
{
    std::string out( action_name( action ) );
    int arity = action_arity( action );
    if( arity == 0 )
        return out;
    out += '(';
    for( int k = 0; k < arity; ++k )
    {
        if( k )
            out += ',';
        out += std::to_string( args[ k ] );
    }
    out += ')';
    return out;
}

Label parse_label( std::string_view text )
{
    auto open = text.find( '(' );
    Label l;
    l.action = parse_action( text.substr( 0, open ) );
    std::vector<int> args;
    if( open != std::string_view::npos )
    {
        auto close = text.find( ')', open );
        if( close == std::string_view::npos )
            throw ConfigError( "unterminated label '" + std::string( text ) + "'" );
        auto inner = text.substr( open + 1, close - open - 1 );
        while( !inner.empty() )
        {
            auto comma = inner.find( ',' );
            args.push_back( parse_int( inner.substr( 0, comma ) ) );
            if( comma == std::string_view::npos )
                break;
            inner.remove_prefix( comma + 1 );
        }
    }
    if( static_cast<int>( args.size() ) != action_arity( l.action ) )
        throw ConfigError( "wrong arity in label '" + std::string( text ) + "'" );
    for( std::size_t k = 0; k < args.size(); ++k )
        l.args[ k ] = static_cast<std::int16_t>( args[ k ] );
    return l;
}

json label_to_json( const Label& l )
{
    return json{ { "label", std::string( action_name( l.action ) ) }, { "args", l.arg_list() } };
}

Label label_from_json( const json& j )
{
    Label l;
    l.action = parse_action( j.at( "label" ).get<std::string>() );
    auto args = j.contains( "args" ) ? j.at( "args" ).get<std::vector<int>>() : std::vector<int>{};
    if( static_cast<int>( args.size() ) != action_arity( l.action ) )
        throw ConfigError( "wrong arity for action " + std::string( action_name( l.action ) ) );
    for( std::size_t k = 0; k < args.size(); ++k )
        l.args[ k ] = static_cast<std::int16_t>( args[ k ] );
    return l;
}

void Bounds::validate() const
{
    for( const auto* b : { &pending, &counter, &token_q, &max_depth } )
        if( b->has_value() && **b < 0 )
            throw ConfigError( "bounds must be >= 0" );
}

json Bounds::to_json() const
{
    json j = json::object();
    if( pending )
        j[ "K" ] = *pending;
    if( counter )
        j[ "C" ] = *counter;
    if( token_q )
        j[ "Q" ] = *token_q;
    if( max_depth )
        j[ "max_depth" ] = *max_depth;
    return j;
}

void SpecInstance::validate() const
{
    if( nodes < 1 )
        throw ConfigError( "N must be at least 1" );
    if( nodes > 255 )
        throw ConfigError( "N must fit in one byte of the canonical encoding" );
    if( name != "abstract" && name != "safra" )
        throw ConfigError( "unknown spec '" + name + "'" );
    if( token_start && *token_start != "any" && *token_start != "initiator" )
        throw ConfigError( "token start must be 'any' or 'initiator'" );
    if( token_start && name != "safra" )
        throw ConfigError( "token start only applies to the safra spec" );
}

void Encoder::i32( std::int32_t v )
{
    auto u = static_cast<std::uint32_t>( v );
    for( int k = 0; k < 4; ++k )
        _out.push_back( static_cast<char>( ( u >> ( 8 * k ) ) & 0xffu ) );
}

std::uint8_t Decoder::u8()
{
    if( _pos >= _in.size() )
        throw ConfigError( "truncated state encoding" );
    return static_cast<std::uint8_t>( _in[ _pos++ ] );
}

std::int32_t Decoder::i32()
{
    if( _pos + 4 > _in.size() )
        throw ConfigError( "truncated state encoding" );
    std::uint32_t u = 0;
    for( int k = 0; k < 4; ++k )
        u |= static_cast<std::uint32_t>( static_cast<std::uint8_t>( _in[ _pos + k ] ) ) << ( 8 * k );
    _pos += 4;
    return static_cast<std::int32_t>( u );
}

Fingerprint fingerprint_bytes( std::string_view bytes )
{
    // FNV-1a followed by a splitmix64 finalizer.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for( unsigned char c : bytes )
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return Fingerprint{ h };
}

std::string to_hex( std::string_view bytes )
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve( bytes.size() * 2 );
    for( unsigned char c : bytes )
    {
        out.push_back( digits[ c >> 4 ] );
        out.push_back( digits[ c & 0xf ] );
    }
    return out;
}

std::string from_hex( std::string_view hex )
{
    if( hex.size() % 2 )
        throw ConfigError( "odd-length hex string" );
    auto nibble = []( char c ) -> int {
        if( c >= '0' && c <= '9' )
            return c - '0';
        if( c >= 'a' && c <= 'f' )
            return c - 'a' + 10;
        if( c >= 'A' && c <= 'F' )
            return c - 'A' + 10;
        throw ConfigError( "bad hex digit" );
    };
    std::string out;
    for( std::size_t i = 0; i < hex.size(); i += 2 )
        out.push_back( static_cast<char>( nibble( hex[ i ] ) * 16 + nibble( hex[ i + 1 ] ) ) );
    return out;
}

std::function<bool( const Label& )> action_set( std::vector<Action> actions )
{
    return [actions = std::move( actions )]( const Label& l ) {
        return std::find( actions.begin(), actions.end(), l.action ) != actions.end();
    };
}

} // namespace tdcheck
