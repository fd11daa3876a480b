#pragma once

#include <cstdint>
#include <random>

namespace tdcheck
{

inline std::uint64_t splitmix64( std::uint64_t x )
{
    x += 0x9e3779b97f4a7c15ull;
    x = ( x ^ ( x >> 30 ) ) * 0xbf58476d1ce4e5b9ull;
    x = ( x ^ ( x >> 27 ) ) * 0x94d049bb133111ebull;
    return x ^ ( x >> 31 );
}

// Independent stream `stream` of a base seed.
inline std::uint64_t derive_seed( std::uint64_t seed, std::uint64_t stream )
{
    return splitmix64( splitmix64( seed ) ^ splitmix64( stream + 0x632be59bd9b4e019ull ) );
}

using Rng = std::mt19937_64;

inline std::uint64_t uniform_below( Rng& rng, std::uint64_t n )
{
    return std::uniform_int_distribution<std::uint64_t>{ 0, n - 1 }( rng );
}

} // namespace tdcheck
