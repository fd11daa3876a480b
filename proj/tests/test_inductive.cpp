#include "test_support.hpp"

#include "tdcheck/inductive_checker.hpp"

#include <doctest.h>

using namespace tdtest;

namespace
{

// Brute force over the oracle universe. Targets may have pending up to k+1,
// since one step can leave the box.
struct IndOracle
{
    std::uint64_t base_states = 0;
    bool violated = false;
};

IndOracle abstract_indinv_oracle( int n, int k, bool drop_guard )
{
    auto universe = oracle::abstract_universe( n, k );
    auto targets = oracle::abstract_universe( n, k + 1 );
    auto inv = []( const oracle::AState& s ) { return !s.term_detect || oracle::terminated( s ); };
    const auto steps = oracle::abstract_steps( n );
    IndOracle out;
    for( const auto& s : universe )
    {
        if( !inv( s ) )
            continue;
        ++out.base_states;
        for( const auto& t : targets )
            for( const auto& st : steps )
                if( oracle::abstract_rel( st, s, t, drop_guard ) && !inv( t ) )
                    out.violated = true;
    }
    return out;
}

} // namespace

TEST_CASE( "abstract IndInv is inductive and agrees with the oracle" )
{
    AbstractSpec spec{ abstract_instance( 3 ) };
    auto init = check_init( spec, std::vector<std::string>{ "IndInv" } );
    CHECK( init.verdict == Verdict::Pass );
    CHECK( init.distinct_states == spec.initial_states().size() );

    auto q = resolve_ind_query( spec, { "IndInv" } );
    auto par = check_step( spec, bounds( 2 ), q );
    auto ser = check_step_serial( spec, bounds( 2 ), q );
    auto ref = abstract_indinv_oracle( 3, 2, false );
    CHECK( par.verdict == Verdict::Pass );
    CHECK( ser.verdict == Verdict::Pass );
    CHECK( !ref.violated );
    CHECK( par.distinct_states == ref.base_states );
    CHECK( ser.distinct_states == ref.base_states );
    CHECK( par.stats[ "edges" ] == ser.stats[ "edges" ] );
}

TEST_CASE( "drop-send-guard breaks inductiveness" )
{
    AbstractSpec spec{ abstract_instance( 3, "drop-send-guard" ) };
    auto q = resolve_ind_query( spec, { "IndInv" } );
    auto par = check_step( spec, bounds( 2 ), q );
    auto ser = check_step_serial( spec, bounds( 2 ), q );
    CHECK( abstract_indinv_oracle( 3, 2, true ).violated );
    REQUIRE( par.verdict == Verdict::Violation );
    REQUIRE( ser.verdict == Verdict::Violation );
    CHECK( par.trace.size() == 2 );
    CHECK( par.trace[ 0 ].encoding == ser.trace[ 0 ].encoding );
    CHECK( par.trace[ 1 ].encoding == ser.trace[ 1 ].encoding );
    CHECK( par.trace[ 1 ].label->action == Action::SendMsg );
    CHECK( replay_report_trace( spec, par ).empty() );
}

TEST_CASE( "safra Inv is inductive at N=2" )
{
    SafraSpec spec{ safra_instance( 2 ) };
    Bounds b = bounds( 1, 1, 2 );
    auto q = resolve_ind_query( spec, { "TypeOK", "Inv" } );
    auto r = check_step( spec, b, q );
    CHECK( r.verdict == Verdict::Pass );
    std::uint64_t expected = 0;
    for( std::uint64_t i = 0; i < oracle::safra_universe_size( 2, { 1, 1, 2 } ); ++i )
        expected += oracle::safra_inv( oracle::safra_state( 2, { 1, 1, 2 }, i ) );
    CHECK( r.distinct_states == expected );
    CHECK( check_init( spec, std::vector<std::string>{ "TypeOK", "Inv" } ).verdict == Verdict::Pass );
    CHECK( check_step_action( spec, b, { "TypeOK", "Inv" }, "refinement-step" ).verdict == Verdict::Pass );
}

TEST_CASE( "a white initial token breaks Inv initially" )
{
    SafraSpec spec{ safra_instance( 3, "token-init-white" ) };
    auto r = check_init( spec, std::vector<std::string>{ "TypeOK", "Inv" } );
    REQUIRE( r.verdict == Verdict::Violation );
    CHECK( r.violated_property == "Inv" );
    CHECK( r.trace.size() == 1 );
}

TEST_CASE( "FALSE as action invariant fails on the first edge" )
{
    AbstractSpec spec{ abstract_instance( 2 ) };
    auto r = check_step_action( spec, bounds( 1 ), { "TRUE" }, "FALSE" );
    REQUIRE( r.verdict == Verdict::Violation );
    CHECK( r.violated_property == "FALSE" );
    auto s = spec.from_json( r.trace[ 0 ].state );
    CHECK( s == spec.universe_state( bounds( 1 ), 0 ) );
}

TEST_CASE( "sampled checks are reproducible per seed" )
{
    AbstractSpec spec{ abstract_instance( 10 ) };
    auto q = resolve_ind_query( spec, { "IndInv" } );
    IndOptions opts{ IndMode::Sampled, 2000, 42, 0 };
    auto a = check_step( spec, bounds( 3 ), q, opts );
    opts.workers = 1;
    auto b = check_step( spec, bounds( 3 ), q, opts );
    CHECK( a.verdict == Verdict::Pass );
    CHECK( a.soundness == Soundness::Probabilistic );
    CHECK( a.distinct_states == 2000 );
    CHECK( a.stats[ "draws" ] == b.stats[ "draws" ] );
    CHECK( a.stats[ "edges" ] == b.stats[ "edges" ] );
    opts.seed = 43;
    auto c = check_step( spec, bounds( 3 ), q, opts );
    CHECK( c.stats[ "edges" ] != a.stats[ "edges" ] );

    InvSampler<AbstractSpec> s1{ spec, bounds( 3 ), q.base, 7 }, s2{ spec, bounds( 3 ), q.base, 7 };
    for( std::uint64_t j = 0; j < 50; ++j )
        CHECK( s1.draw( j ) == s2.draw( j ) );
}

TEST_CASE( "sampling finds violations and is checked against exhaustive search" )
{
    SafraSpec spec{ safra_instance( 3, "token-adopts-node-color" ) };
    Bounds b = bounds( 1, 1, 2 );
    auto q = resolve_ind_query( spec, { "TypeOK", "Inv" } );
    auto exact = check_step( spec, b, q );
    auto sampled = check_step( spec, b, q, IndOptions{ IndMode::Sampled, 10000, 3, 0 } );
    REQUIRE( exact.verdict == Verdict::Violation );
    REQUIRE( sampled.verdict == Verdict::Violation );
    CHECK( replay_report_trace( spec, sampled ).empty() );
    // the sampled source must be a base state
    auto src = spec.from_json( sampled.trace[ 0 ].state );
    CHECK( safra_inv( src ) );

    // soundness: a sampled pass never contradicts an exhaustive pass
    SafraSpec ok{ safra_instance( 3 ) };
    CHECK( check_step( ok, b, q, IndOptions{ IndMode::Sampled, 5000, 9, 0 } ).verdict == Verdict::Pass );
    CHECK( check_step( ok, b, q ).verdict == Verdict::Pass );
}

TEST_CASE( "a sparse base is reported inconclusive" )
{
    AbstractSpec spec{ abstract_instance( 10 ) };
    auto q = resolve_ind_query( spec, { "terminated" } );
    auto r = check_step( spec, bounds( 3 ), q, IndOptions{ IndMode::Sampled, 100, 1, 0 } );
    CHECK( r.verdict == Verdict::Inconclusive );
    CHECK( r.exit_code() == exit_inconclusive );
}
