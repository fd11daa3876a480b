// tdcheck: model checking, inductiveness, random exploration, simulation and
// trace validation for the termination-detection specs.

#include "tdcheck/explicit_checker.hpp"
#include "tdcheck/inductive_checker.hpp"
#include "tdcheck/liveness.hpp"
#include "tdcheck/random_explorer.hpp"
#include "tdcheck/report_render.hpp"
#include "tdcheck/run_config.hpp"
#include "tdcheck/sim_runtime.hpp"
#include "tdcheck/trace_validator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace tdcheck;

namespace
{

struct Flags
{
    std::string config_path;
    std::string format = "text";
    std::string output;
    int workers = -1;

    std::string spec;
    int nodes = 0;
    int k = -1, c = -1, q = -1, max_depth = -1;
    std::vector<std::string> inv, action_inv, property;
    std::string mutant;
    std::string token_start;
    std::uint64_t seed = 0;
    bool seed_set = false;

    // check
    std::string store = "exact";
    std::uint64_t max_states = 0;
    bool serial = false;

    // indcheck / refine
    std::string mode = "exhaustive";
    std::uint64_t samples = 10'000;
    std::string phase = "both";
    std::vector<std::string> base;

    // explore
    double budget = 3000;
    int walk_length = 100;
    std::uint64_t walks = 0;
    std::string choice = "successor";
    std::vector<std::string> from_inv;

    // simulate
    std::uint64_t max_events = 100'000;
    double send_p = 0.3, terminate_p = 0.2, token_priority = 1.0;
    std::uint64_t runs = 1;
    std::string trace_out;

    // validate
    std::string trace;
    bool allow_stutter = false;
    bool label_free = false;
};

struct Resolved
{
    SpecInstance instance;
    RunConfig run;
    int workers = 0;
    OutputFormat format = OutputFormat::Text;
};

Resolved resolve( const Flags& f, const CLI::App& sub )
{
    RunConfig cli;
    if( !f.spec.empty() )
        cli.spec = f.spec;
    if( sub.get_option_no_throw( "--n" ) && sub.count( "--n" ) )
        cli.nodes = f.nodes;
    if( f.k >= 0 )
        cli.bounds.pending = f.k;
    if( f.c >= 0 )
        cli.bounds.counter = f.c;
    if( f.q >= 0 )
        cli.bounds.token_q = f.q;
    if( f.max_depth >= 0 )
        cli.bounds.max_depth = f.max_depth;
    cli.invariants = f.inv;
    cli.action_invariants = f.action_inv;
    cli.properties = f.property;
    if( !f.mutant.empty() )
        cli.mutant = f.mutant;
    if( f.seed_set )
        cli.seed = f.seed;
    if( !f.config_path.empty() )
        cli.merge_defaults( load_config( f.config_path ) );

    Resolved r;
    r.run = cli;
    r.instance.name = cli.spec.value_or( "safra" );
    r.instance.nodes = cli.nodes.value_or( 3 );
    r.instance.mutant = cli.mutant;
    if( !f.token_start.empty() )
        r.instance.token_start = f.token_start;
    r.instance.validate();
    r.run.bounds.validate();
    r.workers = f.workers >= 0 ? f.workers : default_workers();
    r.format = parse_output_format( f.format );
    return r;
}

template <class Fn>
auto with_model( const SpecInstance& inst, Fn&& fn )
{
    if( inst.name == "abstract" )
    {
        AbstractSpec m{ inst };
        return fn( m );
    }
    SafraSpec m{ inst };
    return fn( m );
}

std::vector<std::string> default_invariants( const std::string& spec )
{
    return spec == "abstract" ? std::vector<std::string>{ "TypeOK", "Safe" }
                              : std::vector<std::string>{ "TypeOK", "Inv", "Safe" };
}

std::vector<std::string> default_base( const std::string& spec )
{
    return spec == "abstract" ? std::vector<std::string>{ "IndInv" } : std::vector<std::string>{ "TypeOK", "Inv" };
}

class Output
{
public:
    Output( const std::string& path, OutputFormat format ) : _format{ format }
    {
        if( !path.empty() )
        {
            _file.open( path );
            if( !_file )
                throw ConfigError( "cannot write " + path );
        }
    }

    std::ostream& stream() { return _file.is_open() ? static_cast<std::ostream&>( _file ) : std::cout; }

    void add( const CheckReport& r )
    {
        if( _format == OutputFormat::Json )
            _reports.push_back( r.to_json() );
        else
        {
            if( _count++ )
                stream() << '\n';
            stream() << render( r, OutputFormat::Text );
        }
        _exit = combine( _exit, r.exit_code() );
    }

    int finish()
    {
        if( _format == OutputFormat::Json && !_reports.empty() )
            stream() << ( _reports.size() == 1 ? _reports.front() : json( _reports ) ).dump( 2 ) << '\n';
        return _exit;
    }

private:
    // A violation outranks an inconclusive verdict.
    static int combine( int a, int b )
    {
        if( a == exit_violation || b == exit_violation )
            return exit_violation;
        return std::max( a, b );
    }

    OutputFormat _format;
    std::ofstream _file;
    std::vector<json> _reports;
    int _count = 0;
    int _exit = exit_pass;
};

IndOptions ind_options( const Flags& f, const Resolved& r )
{
    IndOptions o;
    if( f.mode == "exhaustive" )
        o.mode = IndMode::Exhaustive;
    else if( f.mode == "sampled" )
        o.mode = IndMode::Sampled;
    else
        throw ConfigError( "mode must be exhaustive or sampled" );
    o.samples = f.samples;
    o.seed = r.run.seed.value_or( 1 );
    o.workers = r.workers;
    return o;
}

int cmd_check( const Flags& f, const Resolved& r )
{
    Output out{ f.output, r.format };
    with_model( r.instance, [&]( auto& model ) {
        auto invs = r.run.invariants;
        auto acts = r.run.action_invariants;
        if( invs.empty() && acts.empty() )
        {
            invs = default_invariants( r.instance.name );
            acts = { "Quiescence" };
        }
        auto query = resolve_safety( model, invs, acts );
        if( f.serial )
            return out.add( bfs_check_serial( model, r.run.bounds, query ) );
        BfsOptions opts;
        opts.workers = r.workers;
        if( f.max_states )
            opts.max_states = f.max_states;
        if( f.store == "digest" )
            opts.store = StoreMode::Digest;
        else if( f.store != "exact" )
            throw ConfigError( "store must be exact or digest" );
        out.add( bfs_check( model, r.run.bounds, query, opts ) );
    } );
    return out.finish();
}

int cmd_liveness( const Flags& f, const Resolved& r )
{
    Output out{ f.output, r.format };
    with_model( r.instance, [&]( auto& model ) {
        auto props = r.run.properties;
        if( props.empty() )
            props = { "Live" };
        for( const auto& p : props )
            out.add( check_leadsto( model, r.run.bounds, leadsto_property( model, p ), p ) );
    } );
    return out.finish();
}

int cmd_indcheck( const Flags& f, const Resolved& r )
{
    Output out{ f.output, r.format };
    if( f.phase != "init" && f.phase != "step" && f.phase != "both" )
        throw ConfigError( "phase must be init, step or both" );
    with_model( r.instance, [&]( auto& model ) {
        auto base = f.base.empty() ? default_base( r.instance.name ) : f.base;
        if( f.phase != "step" )
            out.add( check_init( model, base ) );
        if( f.phase != "init" )
            out.add( check_step( model, r.run.bounds,
                                 resolve_ind_query( model, base, r.run.invariants, r.run.action_invariants ),
                                 ind_options( f, r ) ) );
    } );
    return out.finish();
}

int cmd_refine( const Flags& f, const Resolved& r )
{
    if( r.instance.name != "safra" )
        throw ConfigError( "refine applies to the safra spec" );
    Output out{ f.output, r.format };
    SafraSpec model{ r.instance };
    auto base = f.base.empty() ? default_base( "safra" ) : f.base;
    if( f.phase != "step" )
        out.add( check_init( model, std::vector<std::string>{ "refinement-init" } ) );
    if( f.phase != "init" )
        out.add( check_step_action( model, r.run.bounds, base, "refinement-step", ind_options( f, r ) ) );
    return out.finish();
}

int cmd_explore( const Flags& f, const Resolved& r )
{
    Output out{ f.output, r.format };
    ExploreConfig cfg;
    cfg.walk_length = f.walk_length;
    cfg.budget_ms = f.budget;
    cfg.walkers = r.workers;
    cfg.seed = r.run.seed.value_or( 1 );
    cfg.choice = parse_walk_choice( f.choice );
    if( f.walks )
        cfg.max_walks = f.walks;
    with_model( r.instance, [&]( auto& model ) {
        auto invs = r.run.invariants;
        auto acts = r.run.action_invariants;
        if( invs.empty() && acts.empty() && r.run.properties.empty() )
        {
            invs = r.instance.name == "abstract" ? std::vector<std::string>{ "SafeInv" }
                                                 : std::vector<std::string>{ "Inv" };
            if( r.instance.name == "safra" )
                acts = { "refinement-step" };
        }
        auto query = resolve_walk_query( model, invs, acts, r.run.properties );
        if( f.from_inv.empty() )
            out.add( explore( model, r.run.bounds, cfg, query ) );
        else
            out.add( explore_from_inv( model, r.run.bounds, cfg, resolve_base( model, f.from_inv ), query ) );
    } );
    return out.finish();
}

int cmd_simulate( const Flags& f, const Resolved& r )
{
    if( r.instance.name != "safra" )
        throw ConfigError( "simulate runs the safra spec" );
    SimConfig cfg;
    cfg.nodes = r.run.nodes.value_or( 5 );
    cfg.seed = r.run.seed.value_or( 1 );
    cfg.max_events = f.max_events;
    cfg.send_probability = f.send_p;
    cfg.terminate_probability = f.terminate_p;
    cfg.token_priority = f.token_priority;
    cfg.mutant = r.instance.mutant;
    cfg.token_start = r.instance.token_start;
    cfg.validate();

    Output out{ f.output, r.format };
    if( f.runs > 1 )
    {
        if( !f.trace_out.empty() )
            throw ConfigError( "--trace-out needs a single run" );
        std::vector<std::uint64_t> seeds;
        for( std::uint64_t k = 0; k < f.runs; ++k )
            seeds.push_back( cfg.seed + k );
        auto summary = run_batch( cfg, seeds, r.workers );
        out.stream() << render( summary, r.format );
        return summary.detection_rate == 1.0 ? exit_pass : exit_inconclusive;
    }
    auto run = run_simulation( cfg );
    if( !f.trace_out.empty() )
        write_trace( run.trace, f.trace_out );
    if( r.format == OutputFormat::Json )
        out.stream() << run.outcome.to_json().dump( 2 ) << '\n';
    else
    {
        const auto& o = run.outcome;
        out.stream() << ( o.detected ? "termination detected" : "termination not detected" ) << " after "
                     << o.events << " events\n";
        if( o.terminated_at )
            out.stream() << "terminated at event " << *o.terminated_at << ", rounds initiated afterwards: "
                         << o.rounds_after_termination << '\n';
        if( !f.trace_out.empty() )
            out.stream() << "trace written to " << f.trace_out << '\n';
    }
    return run.outcome.detected ? exit_pass : exit_inconclusive;
}

int cmd_validate( const Flags& f, const Resolved& r )
{
    auto trace = read_trace( f.trace );
    auto verdict = validate_trace( trace, f.allow_stutter, f.label_free );
    Output out{ f.output, r.format };
    out.stream() << render( verdict, r.format );
    return verdict.exit_code();
}

void add_instance_flags( CLI::App* sub, Flags& f )
{
    sub->add_option( "--spec", f.spec, "abstract or safra" )->check( CLI::IsMember( { "abstract", "safra" } ) );
    sub->add_option( "--n", f.nodes, "number of nodes N" );
    sub->add_option( "--mutant", f.mutant, "seeded bug to enable" );
    sub->add_option( "--token-start", f.token_start, "initial token position: any or initiator" )
        ->check( CLI::IsMember( { "any", "initiator" } ) );
}

void add_bound_flags( CLI::App* sub, Flags& f )
{
    sub->add_option( "--k", f.k, "bound on pending messages per node" );
    sub->add_option( "--c", f.c, "bound on |counter[i]|" );
    sub->add_option( "--q", f.q, "bound on |token.q|" );
    sub->add_option( "--max-depth", f.max_depth, "stop expanding past this depth" );
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "tdcheck: verification workbench for termination-detection specs" };
    app.require_subcommand( 1 );
    app.fallthrough();
    Flags f;
    app.add_option( "--config", f.config_path, "TLC-style or JSON configuration file" );
    app.add_option( "--format", f.format, "text or json" )->check( CLI::IsMember( { "text", "json" } ) );
    app.add_option( "--output", f.output, "write the report here instead of stdout" );
    app.add_option( "--workers", f.workers, "worker threads (default: TDCHECK_WORKERS or all cores)" );

    auto* check = app.add_subcommand( "check", "exhaustive breadth-first safety check" );
    add_instance_flags( check, f );
    add_bound_flags( check, f );
    check->add_option( "--inv", f.inv, "state invariant (repeatable)" );
    check->add_option( "--action-inv", f.action_inv, "action invariant (repeatable)" );
    check->add_option( "--store", f.store, "exact or digest visited set" );
    check->add_option( "--max-states", f.max_states, "give up past this many states" );
    check->add_flag( "--serial", f.serial, "use the single-threaded reference search" );

    auto* liveness = app.add_subcommand( "liveness", "leadsto properties under weak fairness" );
    add_instance_flags( liveness, f );
    add_bound_flags( liveness, f );
    liveness->add_option( "--property", f.property, "leadsto property (repeatable, default Live)" );

    auto* indcheck = app.add_subcommand( "indcheck", "inductive invariant check" );
    add_instance_flags( indcheck, f );
    add_bound_flags( indcheck, f );
    indcheck->add_option( "--base", f.base, "conjunct of the candidate invariant (repeatable)" );
    indcheck->add_option( "--inv", f.inv, "state property to preserve (default: the base)" );
    indcheck->add_option( "--action-inv", f.action_inv, "action property of each edge" );
    indcheck->add_option( "--mode", f.mode, "exhaustive or sampled" );
    indcheck->add_option( "--samples", f.samples, "accepted samples in sampled mode" );
    indcheck->add_option( "--phase", f.phase, "init, step or both" );
    indcheck->add_option( "--seed", f.seed, "sampling seed" );

    auto* refine = app.add_subcommand( "refine", "refinement of the abstract spec by Safra's algorithm" );
    add_instance_flags( refine, f );
    add_bound_flags( refine, f );
    refine->add_option( "--base", f.base, "invariant assumed on step sources (default TypeOK Inv)" );
    refine->add_option( "--mode", f.mode, "exhaustive or sampled" );
    refine->add_option( "--samples", f.samples, "accepted samples in sampled mode" );
    refine->add_option( "--phase", f.phase, "init, step or both" );
    refine->add_option( "--seed", f.seed, "sampling seed" );

    auto* explore_cmd = app.add_subcommand( "explore", "seeded random walks" );
    add_instance_flags( explore_cmd, f );
    add_bound_flags( explore_cmd, f );
    explore_cmd->add_option( "--inv", f.inv, "state invariant (repeatable)" );
    explore_cmd->add_option( "--action-inv", f.action_inv, "action invariant (repeatable)" );
    explore_cmd->add_option( "--property", f.property, "leadsto property checked on walk lassos" );
    explore_cmd->add_option( "--budget", f.budget, "wall-clock budget in ms" );
    explore_cmd->add_option( "--walk-length", f.walk_length, "states per walk" );
    explore_cmd->add_option( "--walks", f.walks, "walks per walker instead of a time budget" );
    explore_cmd->add_option( "--choice", f.choice, "successor or action" );
    explore_cmd->add_option( "--from-inv", f.from_inv, "start from sampled states satisfying these predicates" );
    explore_cmd->add_option( "--seed", f.seed, "base seed" );

    auto* simulate = app.add_subcommand( "simulate", "discrete-event run of Safra's algorithm" );
    simulate->add_option( "--n", f.nodes, "number of nodes N" );
    simulate->add_option( "--mutant", f.mutant, "seeded bug to enable" );
    simulate->add_option( "--token-start", f.token_start, "initial token position: any or initiator" )
        ->check( CLI::IsMember( { "any", "initiator" } ) );
    simulate->add_option( "--seed", f.seed, "scheduler seed" );
    simulate->add_option( "--max-events", f.max_events, "event cap" );
    simulate->add_option( "--send-p", f.send_p, "send weight of an active node" );
    simulate->add_option( "--terminate-p", f.terminate_p, "terminate weight of an active node" );
    simulate->add_option( "--token-priority", f.token_priority, "weight of token moves" );
    simulate->add_option( "--runs", f.runs, "batch of runs with consecutive seeds" );
    simulate->add_option( "--trace-out", f.trace_out, "write the trace of a single run" );

    auto* validate_cmd = app.add_subcommand( "validate", "replay a trace file against its spec" );
    validate_cmd->add_option( "--trace", f.trace, "trace file" )->required();
    validate_cmd->add_flag( "--allow-stutter", f.allow_stutter, "accept steps that leave the state unchanged" );
    validate_cmd->add_flag( "--label-free", f.label_free, "ignore labels; match any transition" );

    try
    {
        app.parse( argc, argv );
    }
    catch( const CLI::CallForHelp& e )
    {
        return app.exit( e );
    }
    catch( const CLI::ParseError& e )
    {
        app.exit( e );
        return exit_config_error;
    }

    try
    {
        const CLI::App* sub = app.get_subcommands().front();
        f.seed_set = sub->get_option_no_throw( "--seed" ) && sub->count( "--seed" ) > 0;
        if( sub == simulate )
            f.spec = "safra";
        if( sub == validate_cmd )
        {
            Resolved r;
            r.format = parse_output_format( f.format );
            return cmd_validate( f, r );
        }
        auto r = resolve( f, *sub );
        if( sub == simulate && !r.run.nodes )
            r.run.nodes = 5;
        if( sub == check )
            return cmd_check( f, r );
        if( sub == liveness )
            return cmd_liveness( f, r );
        if( sub == indcheck )
            return cmd_indcheck( f, r );
        if( sub == refine )
            return cmd_refine( f, r );
        if( sub == explore_cmd )
            return cmd_explore( f, r );
        return cmd_simulate( f, r );
    }
    catch( const ConfigError& e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch( const LookupError& e )
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config_error;
    }
}
