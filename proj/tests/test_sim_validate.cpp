#include "test_support.hpp"

#include "tdcheck/sim_runtime.hpp"
#include "tdcheck/trace_validator.hpp"

#include <doctest.h>

#include <filesystem>

using namespace tdtest;

namespace
{

SimRun sim( int n, std::uint64_t seed )
{
    SimConfig cfg;
    cfg.nodes = n;
    cfg.seed = seed;
    return run_simulation( cfg );
}

} // namespace

TEST_CASE( "simulation is deterministic per seed" )
{
    auto a = sim( 5, 12 );
    auto b = sim( 5, 12 );
    CHECK( a.trace.to_json().dump() == b.trace.to_json().dump() );
    auto c = sim( 5, 13 );
    CHECK( a.trace.to_json().dump() != c.trace.to_json().dump() );
}

TEST_CASE( "simulated runs detect termination and validate" )
{
    for( int n : { 1, 2, 5 } )
        for( std::uint64_t seed = 1; seed <= 10; ++seed )
        {
            auto run = sim( n, seed );
            INFO( "n=" << n << " seed=" << seed );
            CHECK( run.outcome.detected );
            REQUIRE( run.outcome.terminated_at.has_value() );
            CHECK( *run.outcome.terminated_at <= *run.outcome.detected_at );
            CHECK( run.outcome.rounds_after_termination <= 3 );
            CHECK( run.trace.events.size() == run.outcome.events );
            SafraSpec spec{ run.trace.instance };
            CHECK( term_detect( spec.from_json( run.trace.events.empty() ? run.trace.initial
                                                                          : run.trace.events.back().state ) ) );
            CHECK( validate_trace( run.trace, false ).accepted );
            CHECK( validate_trace( run.trace, false, true ).accepted );
        }
}

TEST_CASE( "single-field corruption is rejected at its index" )
{
    auto run = sim( 5, 3 );
    REQUIRE( run.trace.events.size() > 5 );
    Rng rng{ 99 };
    for( int trial = 0; trial < 200; ++trial )
    {
        Trace bad = run.trace;
        const std::size_t idx = 1 + uniform_below( rng, bad.events.size() );
        auto field = flip_field( bad.events[ idx - 1 ].state, rng );
        auto v = validate_trace( bad, false );
        INFO( "index " << idx << " field " << field );
        REQUIRE( !v.accepted );
        CHECK( v.failing_index == idx );
        CHECK( v.exit_code() == 1 );
    }
}

TEST_CASE( "corrupting the initial state" )
{
    auto run = sim( 3, 4 );
    Trace bad = run.trace;
    bad.initial[ "token" ][ "q" ] = 5;
    auto v = validate_trace( bad, false );
    CHECK( !v.accepted );
    CHECK( v.failing_index == 0 );
    CHECK( v.reason == RejectReason::BadInitialState );

    bad = run.trace;
    bad.initial[ "pending" ][ 0 ] = -1;
    v = validate_trace( bad, false );
    CHECK( v.reason == RejectReason::TypeError );
    CHECK( v.failing_index == 0 );

    bad = run.trace;
    bad.initial.erase( "color" );
    CHECK( validate_trace( bad, false ).reason == RejectReason::TypeError );
}

TEST_CASE( "wrong labels and skipped steps" )
{
    auto run = sim( 4, 6 );
    REQUIRE( run.trace.events.size() > 6 );

    Trace relabel = run.trace;
    auto& ev = relabel.events[ 2 ];
    ev.label = ev.label->action == Action::Terminate ? Label::make( Action::InitiateProbe )
                                                     : Label::make( Action::Terminate, 0 );
    auto v = validate_trace( relabel, false );
    CHECK( !v.accepted );
    CHECK( v.failing_index == 3 );

    // Drop event 3: the state after event 4 follows event 2 directly.
    Trace skip = strip_labels( run.trace );
    skip.events.erase( skip.events.begin() + 3 );
    auto w = validate_trace( skip, false, true );
    CHECK( !w.accepted );
    CHECK( w.failing_index == 4 );
    CHECK( w.reason == RejectReason::PostStateMismatch );
}

TEST_CASE( "label-free sequences" )
{
    SafraSpec spec{ safra_instance( 2 ) };
    auto init = spec.initial_states().front();
    CHECK( validate_label_free( spec, std::vector<json>{ spec.to_json( init ) } ).accepted );
    auto not_init = init;
    not_init.counter[ 0 ] = 1;
    auto v = validate_label_free( spec, std::vector<json>{ spec.to_json( not_init ) } );
    CHECK( !v.accepted );
    CHECK( v.failing_index == 0 );
    CHECK( !validate_label_free( spec, std::vector<json>{} ).accepted );
    // repeated states are stutter steps
    CHECK( validate_label_free( spec, std::vector<json>{ spec.to_json( init ), spec.to_json( init ) } ).accepted );
}

TEST_CASE( "stutter steps in labelled traces" )
{
    auto run = sim( 3, 8 );
    Trace t = run.trace;
    t.events.insert( t.events.begin() + 1, TraceEvent{ Label::make( Action::Stutter ), t.events[ 0 ].state } );
    CHECK( !validate_trace( t, false ).accepted );
    CHECK( validate_trace( t, true ).accepted );
    t.events[ 1 ].state = t.events[ 2 ].state;
    CHECK( validate_trace( t, true ).reason == RejectReason::PostStateMismatch );
}

TEST_CASE( "abstract traces" )
{
    AbstractSpec spec{ abstract_instance( 2 ) };
    Trace t;
    t.instance = spec.instance();
    AbstractState s{ { true, false }, { 0, 0 }, false };
    t.initial = spec.to_json( s );
    s.pending[ 1 ] = 1;
    t.events.push_back( { Label::make( Action::SendMsg, 0, 1 ), spec.to_json( s ) } );
    s.active[ 0 ] = false;
    t.events.push_back( { Label::make( Action::Terminate, 0 ), spec.to_json( s ) } );
    s.pending[ 1 ] = 0;
    s.active[ 1 ] = true;
    t.events.push_back( { Label::make( Action::RcvMsg, 1 ), spec.to_json( s ) } );
    CHECK( validate_trace( t, false ).accepted );
    t.events[ 1 ].label = Label::make( Action::Terminate, 1 );
    auto v = validate_trace( t, false );
    CHECK( v.reason == RejectReason::LabelNotEnabled );
    CHECK( v.failing_index == 2 );
}

TEST_CASE( "trace files round trip" )
{
    auto run = sim( 3, 21 );
    auto path = std::filesystem::temp_directory_path() / "tdcheck_trace_roundtrip.json";
    write_trace( run.trace, path );
    auto back = read_trace( path );
    std::filesystem::remove( path );
    CHECK( back.to_json() == run.trace.to_json() );
    CHECK( back.to_json().at( "schema" ) == trace_schema );
    auto bare = strip_labels( back );
    for( const auto& e : bare.events )
        CHECK( !e.label );
    CHECK( bare.states() == back.states() );
}

TEST_CASE( "simulator settings" )
{
    SimConfig cfg;
    cfg.send_probability = -0.1;
    CHECK_THROWS_AS( cfg.validate(), ConfigError );
    cfg = SimConfig{};
    cfg.nodes = 0;
    CHECK_THROWS_AS( cfg.validate(), ConfigError );
    cfg = SimConfig{};
    cfg.max_events = 3;
    cfg.seed = 5;
    auto capped = run_simulation( cfg );
    CHECK( capped.outcome.events <= 3 );
    CHECK( SimConfig::from_json( SimConfig{}.to_json() ).to_json() == SimConfig{}.to_json() );

    SimConfig base;
    base.nodes = 4;
    auto summary = run_batch( base, { 1, 2, 3, 4, 5, 6 } );
    CHECK( summary.runs.size() == 6 );
    CHECK( summary.detection_rate == doctest::Approx( 1.0 ) );
    auto serial = run_batch( base, { 1, 2, 3, 4, 5, 6 }, 1 );
    CHECK( summary.to_json() == serial.to_json() );
}

TEST_CASE( "a buggy simulator trace may be legal for the buggy spec only" )
{
    SimConfig cfg;
    cfg.nodes = 4;
    cfg.mutant = "pass-while-active";
    cfg.send_probability = 0.6;
    for( std::uint64_t seed = 1; seed < 40; ++seed )
    {
        cfg.seed = seed;
        auto run = run_simulation( cfg );
        CHECK( validate_trace( run.trace, false ).accepted );
        Trace plain = run.trace;
        plain.instance.mutant.reset();
        auto v = validate_trace( plain, false );
        if( !v.accepted )
        {
            CHECK( v.reason == RejectReason::LabelNotEnabled );
            return;
        }
    }
    FAIL( "no run passed the token while active" );
}
