#pragma once

// Brute-force reference semantics, written straight from the action
// definitions and independent of the kernel: states are plain structs, the
// bounded universe is enumerated here, and the next-state relation is
// evaluated on explicit (s, t) pairs.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace oracle
{

struct Step
{
    std::string action;
    int i = -1, j = -1;
    friend auto operator<=>( const Step&, const Step& ) = default;
};

// f' = [f EXCEPT ![idx] = val]
inline bool except( const std::vector<int>& f, const std::vector<int>& g, int idx, int val )
{
    for( std::size_t k = 0; k < f.size(); ++k )
        if( g[ k ] != ( static_cast<int>( k ) == idx ? val : f[ k ] ) )
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Abstract termination detection

struct AState
{
    std::vector<int> active;  // 0/1
    std::vector<int> pending;
    int term_detect = 0;
    friend bool operator==( const AState&, const AState& ) = default;
};

inline bool terminated( const AState& s )
{
    for( std::size_t n = 0; n < s.active.size(); ++n )
        if( s.active[ n ] || s.pending[ n ] )
            return false;
    return true;
}

inline std::vector<AState> abstract_universe( int n, int k )
{
    std::vector<AState> out;
    AState s{ std::vector<int>( n ), std::vector<int>( n ), 0 };
    // odometer over (termDetect, active[0], pending[0], ..., active[n-1], pending[n-1])
    for( ;; )
    {
        out.push_back( s );
        int pos = 0;
        for( ;; )
        {
            if( pos == 0 )
            {
                if( ++s.term_detect <= 1 )
                    break;
                s.term_detect = 0;
            }
            else
            {
                int node = ( pos - 1 ) / 2;
                int& f = ( pos - 1 ) % 2 == 0 ? s.active[ node ] : s.pending[ node ];
                int hi = ( pos - 1 ) % 2 == 0 ? 1 : k;
                if( ++f <= hi )
                    break;
                f = 0;
            }
            if( ++pos > 2 * n )
                return out;
        }
    }
}

inline bool abstract_init( const AState& s )
{
    return std::all_of( s.pending.begin(), s.pending.end(), []( int p ) { return p == 0; } ) &&
           ( s.term_detect == 0 || terminated( s ) );
}

// Next as a relation on explicit pairs. `drop_send_guard` removes active[i]
// from SendMsg.
inline bool abstract_rel( const Step& a, const AState& s, const AState& t, bool drop_send_guard = false )
{
    const int n = static_cast<int>( s.active.size() );
    if( a.action == "Terminate" )
        return s.active[ a.i ] && except( s.active, t.active, a.i, 0 ) && t.pending == s.pending &&
               ( t.term_detect == s.term_detect || t.term_detect == static_cast<int>( terminated( t ) ) );
    if( a.action == "SendMsg" )
        return ( drop_send_guard || s.active[ a.i ] ) && a.j >= 0 && a.j < n &&
               except( s.pending, t.pending, a.j, s.pending[ a.j ] + 1 ) && t.active == s.active &&
               t.term_detect == s.term_detect;
    if( a.action == "RcvMsg" )
        return s.pending[ a.i ] > 0 && except( s.active, t.active, a.i, 1 ) &&
               except( s.pending, t.pending, a.i, s.pending[ a.i ] - 1 ) && t.term_detect == s.term_detect;
    if( a.action == "DetectTermination" )
        return terminated( s ) && t.term_detect == 1 && t.active == s.active && t.pending == s.pending;
    return false;
}

inline std::vector<Step> abstract_steps( int n )
{
    std::vector<Step> out;
    for( int i = 0; i < n; ++i )
        for( int j = 0; j < n; ++j )
            out.push_back( { "SendMsg", i, j } );
    for( int i = 0; i < n; ++i )
        out.push_back( { "RcvMsg", i, -1 } );
    for( int i = 0; i < n; ++i )
        out.push_back( { "Terminate", i, -1 } );
    out.push_back( { "DetectTermination", -1, -1 } );
    return out;
}

// ---------------------------------------------------------------------------
// Safra's algorithm. Colors: 0 white, 1 black.

struct SState
{
    std::vector<int> active, pending, color, counter;
    int tp = 0, tc = 1, tq = 0;
    friend bool operator==( const SState&, const SState& ) = default;
};

inline bool terminated( const SState& s )
{
    for( std::size_t n = 0; n < s.active.size(); ++n )
        if( s.active[ n ] || s.pending[ n ] )
            return false;
    return true;
}

inline bool term_detect( const SState& s )
{
    return s.tp == 0 && s.tc == 0 && s.color[ 0 ] == 0 && !s.active[ 0 ] && s.pending[ 0 ] == 0 &&
           s.tq + s.counter[ 0 ] == 0;
}

struct SBounds
{
    int k, c, q;
};

// Mixed radix over (tp, tc, tq, then per node active, color, pending, counter).
inline std::uint64_t safra_universe_size( int n, SBounds b )
{
    std::uint64_t size = static_cast<std::uint64_t>( n ) * 2 * ( 2 * b.q + 1 );
    for( int i = 0; i < n; ++i )
        size *= 2ull * 2 * ( b.k + 1 ) * ( 2 * b.c + 1 );
    return size;
}

inline SState safra_state( int n, SBounds b, std::uint64_t idx )
{
    SState s;
    s.tp = static_cast<int>( idx % n );
    idx /= n;
    s.tc = static_cast<int>( idx % 2 );
    idx /= 2;
    s.tq = static_cast<int>( idx % ( 2 * b.q + 1 ) ) - b.q;
    idx /= 2 * b.q + 1;
    for( int i = 0; i < n; ++i )
    {
        s.active.push_back( static_cast<int>( idx % 2 ) );
        idx /= 2;
        s.color.push_back( static_cast<int>( idx % 2 ) );
        idx /= 2;
        s.pending.push_back( static_cast<int>( idx % ( b.k + 1 ) ) );
        idx /= b.k + 1;
        s.counter.push_back( static_cast<int>( idx % ( 2 * b.c + 1 ) ) - b.c );
        idx /= 2 * b.c + 1;
    }
    return s;
}

inline std::optional<std::uint64_t> safra_index( SBounds b, const SState& s )
{
    const int n = static_cast<int>( s.active.size() );
    if( s.tq < -b.q || s.tq > b.q )
        return std::nullopt;
    std::uint64_t idx = 0, mul = 1;
    auto put = [&]( int digit, int radix ) {
        idx += static_cast<std::uint64_t>( digit ) * mul;
        mul *= radix;
    };
    put( s.tp, n );
    put( s.tc, 2 );
    put( s.tq + b.q, 2 * b.q + 1 );
    for( int i = 0; i < n; ++i )
    {
        if( s.pending[ i ] > b.k || s.counter[ i ] < -b.c || s.counter[ i ] > b.c )
            return std::nullopt;
        put( s.active[ i ], 2 );
        put( s.color[ i ], 2 );
        put( s.pending[ i ], b.k + 1 );
        put( s.counter[ i ] + b.c, 2 * b.c + 1 );
    }
    return idx;
}

inline bool safra_init( const SState& s, bool token_white = false )
{
    auto zero = []( int v ) { return v == 0; };
    return std::all_of( s.pending.begin(), s.pending.end(), zero ) &&
           std::all_of( s.counter.begin(), s.counter.end(), zero ) && s.tq == 0 && s.tc == ( token_white ? 0 : 1 );
}

struct SMutant
{
    bool adopt_color = false, pass_active = false, no_whiten = false, no_initiate_black = false,
         receiver_stays = false;
};

inline bool safra_rel( const Step& a, const SState& s, const SState& t, SMutant m = {} )
{
    const int n = static_cast<int>( s.active.size() );
    auto token_same = [&] { return t.tp == s.tp && t.tc == s.tc && t.tq == s.tq; };
    if( a.action == "InitiateProbe" )
    {
        bool guard = s.tp == 0 && ( s.tc == 1 || s.color[ 0 ] == 1 || s.counter[ 0 ] + s.tq > 0 );
        if( m.no_initiate_black )
            guard = guard && s.color[ 0 ] == 0;
        return guard && t.tp == n - 1 && t.tc == 0 && t.tq == 0 && except( s.color, t.color, 0, 0 ) &&
               t.active == s.active && t.pending == s.pending && t.counter == s.counter;
    }
    if( a.action == "PassToken" )
    {
        const int i = a.i;
        if( i <= 0 || s.tp != i || ( !m.pass_active && s.active[ i ] ) )
            return false;
        int tc = m.adopt_color ? s.color[ i ] : ( s.color[ i ] == 1 || s.tc == 1 ? 1 : 0 );
        const bool color = m.no_whiten ? t.color == s.color : except( s.color, t.color, i, 0 );
        return t.tp == i - 1 && t.tq == s.tq + s.counter[ i ] && t.tc == tc && color &&
               t.active == s.active && t.pending == s.pending && t.counter == s.counter;
    }
    if( a.action == "SendMsg" )
        return s.active[ a.i ] && except( s.pending, t.pending, a.j, s.pending[ a.j ] + 1 ) &&
               except( s.counter, t.counter, a.i, s.counter[ a.i ] + 1 ) && t.active == s.active &&
               t.color == s.color && token_same();
    if( a.action == "RcvMsg" )
    {
        const int i = a.i;
        const bool color = m.receiver_stays ? t.color == s.color : except( s.color, t.color, i, 1 );
        return s.pending[ i ] > 0 && except( s.pending, t.pending, i, s.pending[ i ] - 1 ) &&
               except( s.counter, t.counter, i, s.counter[ i ] - 1 ) && except( s.active, t.active, i, 1 ) &&
               color && token_same();
    }
    if( a.action == "Terminate" )
        return s.active[ a.i ] && except( s.active, t.active, a.i, 0 ) && t.pending == s.pending &&
               t.counter == s.counter && t.color == s.color && token_same();
    return false;
}

inline std::vector<Step> safra_steps( int n )
{
    std::vector<Step> out{ { "InitiateProbe", -1, -1 } };
    for( int i = 1; i < n; ++i )
        out.push_back( { "PassToken", i, -1 } );
    for( int i = 0; i < n; ++i )
        for( int j = 0; j < n; ++j )
            out.push_back( { "SendMsg", i, j } );
    for( int i = 0; i < n; ++i )
        out.push_back( { "RcvMsg", i, -1 } );
    for( int i = 0; i < n; ++i )
        out.push_back( { "Terminate", i, -1 } );
    return out;
}

// Cheap necessary condition for safra_rel(a, s, .) to hold for some t.
inline bool safra_guard( const Step& a, const SState& s, SMutant m = {} )
{
    if( a.action == "InitiateProbe" )
        return s.tp == 0 && ( s.tc == 1 || s.color[ 0 ] == 1 || s.counter[ 0 ] + s.tq > 0 ) &&
               ( !m.no_initiate_black || s.color[ 0 ] == 0 );
    if( a.action == "PassToken" )
        return s.tp == a.i && ( m.pass_active || !s.active[ a.i ] );
    if( a.action == "SendMsg" || a.action == "Terminate" )
        return s.active[ a.i ] != 0;
    if( a.action == "RcvMsg" )
        return s.pending[ a.i ] > 0;
    return false;
}

// Two-way sums from the invariant, over Rng(a, b) = {a..b} within 0..n-1.
inline int sum_range( const std::vector<int>& f, int a, int b )
{
    int total = 0;
    for( int i = std::max( a, 0 ); i <= b && i < static_cast<int>( f.size() ); ++i )
        total += f[ i ];
    return total;
}

inline bool safra_inv( const SState& s )
{
    const int n = static_cast<int>( s.active.size() );
    if( std::accumulate( s.pending.begin(), s.pending.end(), 0 ) !=
        std::accumulate( s.counter.begin(), s.counter.end(), 0 ) )
        return false;
    bool quiet = true;
    for( int i = s.tp + 1; i < n; ++i )
        quiet = quiet && !s.active[ i ];
    quiet = quiet && s.tq == sum_range( s.counter, s.tp + 1, n - 1 );
    bool positive = sum_range( s.counter, 0, s.tp ) + s.tq > 0;
    bool black = false;
    for( int i = 0; i <= s.tp; ++i )
        black = black || s.color[ i ] == 1;
    return quiet || positive || black || s.tc == 1;
}

} // namespace oracle
