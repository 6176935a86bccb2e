#include "tala/app/config.hpp"
#include "tala/app/runs.hpp"
#include "tala/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_config = 2;
constexpr int exit_solver = 3;

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Matrix-free TALA mantle convection on a blended annulus" };
    app.require_subcommand( 1 );

    std::string   config_path, output, checkpoint, resume;
    int           threads = -1;
    std::uint64_t seed    = 0;
    bool          seed_set = false;

    app.add_option( "--config", config_path, "INI configuration file" )->check( CLI::ExistingFile );
    app.add_option( "--threads", threads, "worker threads" )->check( CLI::PositiveNumber );
    app.add_option_function< std::uint64_t >( "--seed", [&]( const std::uint64_t& s ) { seed = s; seed_set = true; }, "RNG seed" );
    app.add_option( "--output", output, "output directory" );
    app.add_option( "--checkpoint", checkpoint, "checkpoint file written by simulate" );
    app.add_option( "--resume", resume, "checkpoint to resume simulate from" )->check( CLI::ExistingFile );

    auto* conv  = app.add_subcommand( "convergence-test", "temporal convergence with a manufactured solution" )->fallthrough();
    auto* bench = app.add_subcommand( "solver-bench", "Uzawa / Schur comparison on the first Stokes solve" )->fallthrough();
    auto* sim   = app.add_subcommand( "simulate", "time-dependent convection run" )->fallthrough();

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        const int code = app.exit( e );
        return code == 0 ? 0 : exit_config;
    }

    tala::app::RunConfig cfg;
    try
    {
        if ( !config_path.empty() )
            cfg = tala::app::load_config( config_path );
        if ( conv->parsed() )
            cfg.mode = "convergence-test";
        else if ( bench->parsed() )
            cfg.mode = "solver-bench";
        else if ( sim->parsed() )
            cfg.mode = "simulate";
        if ( threads > 0 )
            cfg.threads = threads;
        if ( seed_set )
            cfg.seed = seed;
        if ( !output.empty() )
            cfg.output.dir = output;
        if ( ( !checkpoint.empty() || !resume.empty() ) && cfg.mode != "simulate" )
            throw tala::app::ConfigError( "--checkpoint and --resume only apply to simulate" );
        cfg.validate();
    }
    catch ( const tala::app::ConfigError& e )
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch ( const std::exception& e )
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }

    if ( cfg.threads > 0 )
        tala::set_thread_count( cfg.threads );

    try
    {
        if ( cfg.mode == "convergence-test" )
        {
            const auto rep = tala::app::run_convergence_test( cfg, cfg.output.dir );
            for ( const auto& f : rep.fits )
                std::cout << "k = " << f.k << ", level " << f.level << ": slope " << f.slope << ", constant " << f.constant << '\n';
            if ( rep.budget_exhausted )
                std::cout << "wall budget reached; remaining runs skipped\n";
        }
        else if ( cfg.mode == "solver-bench" )
        {
            tala::app::run_solver_bench( cfg, cfg.output.dir );
        }
        else
        {
            const auto rep = tala::app::run_simulation( cfg, { checkpoint, resume } );
            std::cout << "steps " << rep.steps << ", t = " << rep.t << ( rep.message.empty() ? "" : ", " + rep.message ) << '\n';
            if ( rep.failed )
                return exit_solver;
        }
    }
    catch ( const tala::energy::CheckpointError& e )
    {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return exit_config;
    }
    catch ( const tala::krylov::SolverFailure& e )
    {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_solver;
    }
    catch ( const tala::ContractViolation& e )
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
