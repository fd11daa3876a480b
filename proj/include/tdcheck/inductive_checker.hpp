#pragma once

// One-step checks over the bounded, type-correct state universe: a candidate
// invariant holds initially, and every edge leaving a state that satisfies it
// preserves it (or some other state or action invariant). States come either
// from full enumeration or from seeded uniform sampling with rejection.

#include "tdcheck/explicit_checker.hpp"
#include "tdcheck/rng.hpp"

#include <omp.h>

#include <atomic>
#include <exception>

namespace tdcheck
{

enum class IndMode
{
    Exhaustive,
    Sampled,
};

struct IndOptions
{
    IndMode mode = IndMode::Exhaustive;
    std::uint64_t samples = 10'000;
    std::uint64_t seed = 1;
    int workers = 0;
};

inline constexpr std::uint64_t probe_batch = 10'000;
inline constexpr double min_acceptance = 0.001;

template <class State>
struct IndQuery
{
    std::vector<NamedStatePredicate<State>> base;  // conjunction
    SafetyQuery<State> step;                       // empty: the base itself

    [[nodiscard]] std::string base_name() const
    {
        std::string out;
        for( const auto& p : base )
            out += ( out.empty() ? "" : " /\\ " ) + p.name;
        return out;
    }
};

template <Model M>
std::vector<NamedStatePredicate<typename M::State>> resolve_base( const M& model,
                                                                  const std::vector<std::string>& names )
{
    if( names.empty() )
        throw ConfigError( "an inductive check needs at least one base predicate" );
    std::vector<NamedStatePredicate<typename M::State>> out;
    for( const auto& n : names )
        out.push_back( state_predicate( model, n ) );
    return out;
}

template <Model M>
IndQuery<typename M::State> resolve_ind_query( const M& model, const std::vector<std::string>& base,
                                               const std::vector<std::string>& invariants = {},
                                               const std::vector<std::string>& action_invariants = {} )
{
    return { resolve_base( model, base ), resolve_safety( model, invariants, action_invariants ) };
}

namespace detail
{

template <class State>
bool holds_all( const std::vector<NamedStatePredicate<State>>& preds, const State& s )
{
    for( const auto& p : preds )
        if( !p.eval( s ) )
            return false;
    return true;
}

template <class State>
SafetyQuery<State> effective_step( const IndQuery<State>& q )
{
    if( !q.step.invariants.empty() || !q.step.action_invariants.empty() )
        return q.step;
    return SafetyQuery<State>{ q.base, {} };
}

} // namespace detail

// Draw j of a seeded sampler is a pure function of (seed, j): a uniform index
// into the mixed-radix universe, i.e. every field uniform and independent.
template <Model M>
class InvSampler
{
public:
    using State = typename M::State;

    InvSampler( const M& model, const Bounds& bounds, std::vector<NamedStatePredicate<State>> base,
                std::uint64_t seed )
        : _model{ model }, _bounds{ bounds }, _base{ std::move( base ) }, _seed{ seed },
          _size{ model.universe_size( bounds ) }
    {
    }

    [[nodiscard]] State draw( std::uint64_t j ) const
    {
        Rng rng{ derive_seed( _seed, j ) };
        return _model.universe_state( _bounds, uniform_below( rng, _size ) );
    }

    [[nodiscard]] bool accepts( const State& s ) const { return detail::holds_all( _base, s ); }

    // Fraction of the first `probe_batch` draws satisfying the base.
    [[nodiscard]] double probe( int workers ) const
    {
        std::uint64_t hits = 0;
#pragma omp parallel for num_threads( workers ) reduction( + : hits ) schedule( static )
        for( std::uint64_t j = 0; j < probe_batch; ++j )
            hits += accepts( draw( j ) ) ? 1 : 0;
        return static_cast<double>( hits ) / static_cast<double>( probe_batch );
    }

    [[nodiscard]] std::uint64_t universe_size() const { return _size; }

private:
    const M& _model;
    Bounds _bounds;
    std::vector<NamedStatePredicate<State>> _base;
    std::uint64_t _seed;
    std::uint64_t _size;
};

template <Model M>
CheckReport check_init( const M& model, const std::vector<NamedStatePredicate<typename M::State>>& base )
{
    Stopwatch clock;
    CheckReport report = make_report( model, "init", Bounds{} );
    for( const auto& p : base )
        report.properties.push_back( p.name );
    auto inits = model.initial_states();
    report.verdict = Verdict::Pass;
    for( const auto& s : inits )
    {
        for( const auto& p : base )
            if( !p.eval( s ) )
            {
                report.verdict = Verdict::Violation;
                report.violated_property = p.name;
                report.trace = { trace_step( model, std::nullopt, s ) };
                break;
            }
        if( report.verdict == Verdict::Violation )
            break;
    }
    report.distinct_states = inits.size();
    report.wall_ms = clock.elapsed_ms();
    return report;
}

template <Model M>
CheckReport check_init( const M& model, const std::vector<std::string>& base )
{
    return check_init( model, resolve_base( model, base ) );
}

namespace detail
{

struct EdgeViolation
{
    std::uint64_t source = UINT64_MAX;  // universe index or draw number
    std::size_t successor = SIZE_MAX;
    const std::string* property = nullptr;
};

// Checks every successor edge of s; returns the first failing one.
template <Model M>
std::pair<std::size_t, const std::string*> first_bad_edge( const M& model, const SafetyQuery<typename M::State>& q,
                                                            const typename M::State& s, std::uint64_t& edges )
{
    auto succ = model.successors( s );
    edges += succ.size();
    for( std::size_t k = 0; k < succ.size(); ++k )
        if( const auto* bad = first_failure( q, s, succ[ k ].target ) )
            return { k, bad };
    return { SIZE_MAX, nullptr };
}

template <Model M>
void report_edge( const M& model, CheckReport& report, const typename M::State& s, const EdgeViolation& v )
{
    auto succ = model.successors( s );
    auto& tr = succ.at( v.successor );
    report.verdict = Verdict::Violation;
    report.violated_property = *v.property;
    report.trace = { trace_step( model, std::nullopt, s ), trace_step( model, tr.label, tr.target ) };
}

} // namespace detail

// Exhaustive or sampled inductiveness: every edge out of a base state
// satisfies the step query. Successors may leave the bounding box and are
// still checked.
template <Model M>
CheckReport check_step( const M& model, const Bounds& bounds, const IndQuery<typename M::State>& query,
                        const IndOptions& opts = {} )
{
    using State = typename M::State;
    Stopwatch clock;
    bounds.validate();
    const auto step = detail::effective_step( query );
    CheckReport report = make_report( model, "step", bounds );
    report.properties = step.names();
    report.stats[ "base" ] = query.base_name();
    report.stats[ "mode" ] = opts.mode == IndMode::Exhaustive ? "exhaustive" : "sampled";
    const int workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();

    auto finish = [&]( Verdict v ) {
        if( report.verdict != Verdict::Violation )
            report.verdict = v;
        report.wall_ms = clock.elapsed_ms();
        return report;
    };

    if( opts.mode == IndMode::Exhaustive )
    {
        const std::uint64_t size = model.universe_size( bounds );
        std::atomic<std::uint64_t> best{ UINT64_MAX };
        std::vector<detail::EdgeViolation> found( workers );
        std::uint64_t accepted = 0, edges = 0;
        std::exception_ptr error;

#pragma omp parallel num_threads( workers ) reduction( + : accepted, edges )
        {
            const int tid = omp_get_thread_num();
#pragma omp for schedule( dynamic, 1024 )
            for( std::uint64_t idx = 0; idx < size; ++idx )
            {
                if( idx > best.load( std::memory_order_relaxed ) )
                    continue;
                try
                {
                    State s = model.universe_state( bounds, idx );
                    if( !detail::holds_all( query.base, s ) )
                        continue;
                    ++accepted;
                    auto [k, bad] = detail::first_bad_edge( model, step, s, edges );
                    if( !bad )
                        continue;
                    if( idx < found[ tid ].source )
                        found[ tid ] = { idx, k, bad };
                    auto cur = best.load();
                    while( idx < cur && !best.compare_exchange_weak( cur, idx ) )
                    {
                    }
                }
                catch( ... )
                {
#pragma omp critical( tdcheck_ind_error )
                    if( !error )
                        error = std::current_exception();
                    best = 0;
                }
            }
        }
        if( error )
            std::rethrow_exception( error );

        report.distinct_states = accepted;
        report.stats[ "universe" ] = size;
        report.stats[ "edges" ] = edges;
        detail::EdgeViolation v;
        for( const auto& f : found )
            if( f.property && f.source < v.source )
                v = f;
        if( v.property )
            detail::report_edge( model, report, model.universe_state( bounds, v.source ), v );
        return finish( Verdict::Pass );
    }

    if( opts.samples < 1 )
        throw ConfigError( "sampled mode needs at least one sample" );
    report.soundness = Soundness::Probabilistic;
    InvSampler<M> sampler{ model, bounds, query.base, opts.seed };
    const double rate = sampler.probe( workers );
    report.stats[ "universe" ] = sampler.universe_size();
    report.stats[ "acceptance" ] = rate;
    report.stats[ "seed" ] = opts.seed;
    if( rate < min_acceptance )
    {
        report.message = "base predicate too sparse to sample (acceptance " + std::to_string( rate ) + ")";
        return finish( Verdict::Inconclusive );
    }

    // Draws are processed in chunks; the accepted ones count in draw order,
    // so the checked sample set does not depend on the worker count.
    const std::uint64_t chunk = 8192;
    std::uint64_t accepted = 0, edges = 0, drawn = 0;
    std::vector<std::uint8_t> ok( chunk );
    std::vector<detail::EdgeViolation> bad( chunk );
    while( accepted < opts.samples )
    {
        std::exception_ptr error;
#pragma omp parallel for num_threads( workers ) reduction( + : edges ) schedule( dynamic, 64 )
        for( std::uint64_t j = 0; j < chunk; ++j )
        {
            try
            {
                State s = sampler.draw( drawn + j );
                ok[ j ] = sampler.accepts( s );
                bad[ j ] = {};
                if( !ok[ j ] )
                    continue;
                auto [k, p] = detail::first_bad_edge( model, step, s, edges );
                if( p )
                    bad[ j ] = { drawn + j, k, p };
            }
            catch( ... )
            {
#pragma omp critical( tdcheck_ind_error )
                if( !error )
                    error = std::current_exception();
            }
        }
        if( error )
            std::rethrow_exception( error );
        for( std::uint64_t j = 0; j < chunk && accepted < opts.samples; ++j )
        {
            if( !ok[ j ] )
                continue;
            ++accepted;
            if( bad[ j ].property )
            {
                detail::report_edge( model, report, sampler.draw( drawn + j ), bad[ j ] );
                report.distinct_states = accepted;
                report.stats[ "draws" ] = drawn + j + 1;
                report.stats[ "edges" ] = edges;
                return finish( Verdict::Pass );
            }
        }
        drawn += chunk;
    }
    report.distinct_states = accepted;
    report.stats[ "draws" ] = drawn;
    report.stats[ "edges" ] = edges;
    return finish( Verdict::Pass );
}

// The step query is a single action invariant.
template <Model M>
CheckReport check_step_action( const M& model, const Bounds& bounds, const std::vector<std::string>& base,
                               const std::string& action_invariant, const IndOptions& opts = {} )
{
    return check_step( model, bounds, resolve_ind_query( model, base, {}, { action_invariant } ), opts );
}

// Serial exhaustive reference for check_step.
template <Model M>
CheckReport check_step_serial( const M& model, const Bounds& bounds, const IndQuery<typename M::State>& query )
{
    Stopwatch clock;
    const auto step = detail::effective_step( query );
    CheckReport report = make_report( model, "step", bounds );
    report.properties = step.names();
    const std::uint64_t size = model.universe_size( bounds );
    std::uint64_t edges = 0;
    for( std::uint64_t idx = 0; idx < size; ++idx )
    {
        auto s = model.universe_state( bounds, idx );
        if( !detail::holds_all( query.base, s ) )
            continue;
        ++report.distinct_states;
        auto [k, bad] = detail::first_bad_edge( model, step, s, edges );
        if( bad )
        {
            detail::report_edge( model, report, s, detail::EdgeViolation{ idx, k, bad } );
            break;
        }
    }
    report.stats[ "edges" ] = edges;
    report.wall_ms = clock.elapsed_ms();
    return report;
}

} // namespace tdcheck
