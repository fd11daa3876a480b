#include "tdcheck/random_explorer.hpp"

namespace tdcheck
{

WalkChoice parse_walk_choice( std::string_view name )
{
    if( name == "successor" )
        return WalkChoice::Successor;
    if( name == "action" )
        return WalkChoice::Action;
    throw ConfigError( "unknown walk choice '" + std::string( name ) + "' (expected successor or action)" );
}

std::string_view walk_choice_name( WalkChoice c )
{
    return c == WalkChoice::Successor ? "successor" : "action";
}

} // namespace tdcheck
