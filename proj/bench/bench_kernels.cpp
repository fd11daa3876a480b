// Serial reference vs OpenMP kernels on the same instances.

#include "tdcheck/explicit_checker.hpp"
#include "tdcheck/inductive_checker.hpp"
#include "tdcheck/safra_spec.hpp"

#include <benchmark/benchmark.h>

using namespace tdcheck;

namespace
{

Bounds safra_bounds( int k, int c, int q )
{
    Bounds b;
    b.pending = k;
    b.counter = c;
    b.token_q = q;
    return b;
}

const SafraSpec& safra3()
{
    static SafraSpec spec{ SpecInstance{ "safra", 3, std::nullopt, std::nullopt } };
    return spec;
}

const AbstractSpec& abstract5()
{
    static AbstractSpec spec{ SpecInstance{ "abstract", 5, std::nullopt, std::nullopt } };
    return spec;
}

void bfs_serial_safra( benchmark::State& state )
{
    const auto& spec = safra3();
    auto q = resolve_safety( spec, { "TypeOK", "Inv" }, {} );
    for( auto _ : state )
    {
        auto r = bfs_check_serial( spec, safra_bounds( 2, 2, 4 ), q );
        state.counters[ "states" ] = static_cast<double>( r.distinct_states );
    }
}

void bfs_parallel_safra( benchmark::State& state )
{
    const auto& spec = safra3();
    auto q = resolve_safety( spec, { "TypeOK", "Inv" }, {} );
    BfsOptions opts;
    opts.workers = static_cast<int>( state.range( 0 ) );
    for( auto _ : state )
    {
        auto r = bfs_check( spec, safra_bounds( 2, 2, 4 ), q, opts );
        state.counters[ "states" ] = static_cast<double>( r.distinct_states );
    }
}

void bfs_serial_abstract( benchmark::State& state )
{
    const auto& spec = abstract5();
    Bounds b;
    b.pending = 3;
    auto q = resolve_safety( spec, { "TypeOK", "Safe" }, { "Quiescence" } );
    for( auto _ : state )
        benchmark::DoNotOptimize( bfs_check_serial( spec, b, q ).distinct_states );
}

void bfs_parallel_abstract( benchmark::State& state )
{
    const auto& spec = abstract5();
    Bounds b;
    b.pending = 3;
    auto q = resolve_safety( spec, { "TypeOK", "Safe" }, { "Quiescence" } );
    BfsOptions opts;
    opts.workers = static_cast<int>( state.range( 0 ) );
    for( auto _ : state )
        benchmark::DoNotOptimize( bfs_check( spec, b, q, opts ).distinct_states );
}

void step_serial_safra( benchmark::State& state )
{
    SafraSpec spec{ SpecInstance{ "safra", 2, std::nullopt, std::nullopt } };
    auto q = resolve_ind_query( spec, { "TypeOK", "Inv" } );
    for( auto _ : state )
        benchmark::DoNotOptimize( check_step_serial( spec, safra_bounds( 2, 2, 4 ), q ).distinct_states );
}

void step_parallel_safra( benchmark::State& state )
{
    SafraSpec spec{ SpecInstance{ "safra", 2, std::nullopt, std::nullopt } };
    auto q = resolve_ind_query( spec, { "TypeOK", "Inv" } );
    IndOptions opts;
    opts.workers = static_cast<int>( state.range( 0 ) );
    for( auto _ : state )
        benchmark::DoNotOptimize( check_step( spec, safra_bounds( 2, 2, 4 ), q, opts ).distinct_states );
}

void step_sampled_safra( benchmark::State& state )
{
    SafraSpec spec{ SpecInstance{ "safra", 4, std::nullopt, std::nullopt } };
    auto q = resolve_ind_query( spec, { "TypeOK", "Inv" } );
    IndOptions opts{ IndMode::Sampled, 10'000, 1, static_cast<int>( state.range( 0 ) ) };
    for( auto _ : state )
        benchmark::DoNotOptimize( check_step( spec, safra_bounds( 3, 3, 9 ), q, opts ).distinct_states );
}

} // namespace

BENCHMARK( bfs_serial_safra )->Unit( benchmark::kMillisecond );
BENCHMARK( bfs_parallel_safra )->Arg( 1 )->Arg( 2 )->Arg( 4 )->Unit( benchmark::kMillisecond );
BENCHMARK( bfs_serial_abstract )->Unit( benchmark::kMillisecond );
BENCHMARK( bfs_parallel_abstract )->Arg( 1 )->Arg( 2 )->Arg( 4 )->Unit( benchmark::kMillisecond );
BENCHMARK( step_serial_safra )->Unit( benchmark::kMillisecond );
BENCHMARK( step_parallel_safra )->Arg( 1 )->Arg( 2 )->Arg( 4 )->Unit( benchmark::kMillisecond );
BENCHMARK( step_sampled_safra )->Arg( 1 )->Arg( 4 )->Unit( benchmark::kMillisecond );

BENCHMARK_MAIN();
