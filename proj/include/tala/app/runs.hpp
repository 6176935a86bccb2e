#pragma once

#include "tala/app/config.hpp"
#include "tala/app/manufactured.hpp"
#include "tala/energy/time_stepping.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tala::app {

std::shared_ptr< fem::Discretization > make_discretization( int n_tangential, int n_radial, double r_cmb, double r_surface,
                                                            int l_max, bool blending = true );

/// Least-squares slope of log y against log x.
double loglog_slope( const std::vector< double >& x, const std::vector< double >& y );

// ---- temporal convergence ------------------------------------------------------------

struct ConvergenceRow
{
    double k       = 0.0;
    int    level   = 0;
    int    steps   = 0;
    double tau     = 0.0;
    double error   = 0.0;
    double seconds = 0.0;
};

struct ConvergenceFit
{
    double k        = 0.0;
    int    level    = 0;
    double slope    = 0.0;
    double constant = 0.0; // C in error = C tau^2, fitted in log space
};

struct ConvergenceReport
{
    std::vector< ConvergenceRow > rows;
    std::vector< ConvergenceFit > fits;
    bool                          budget_exhausted = false;
};

/// Discrete L2 error at the final time of one manufactured run with `steps` equidistant steps.
double manufactured_error( const fem::Discretization& d, int level, const ConvergenceConfig& cc, double k, int steps );

ConvergenceFit fit_convergence( double k, int level, const std::vector< ConvergenceRow >& rows );

ConvergenceReport run_convergence_test( const RunConfig& cfg, const std::string& out_dir );

// ---- solver comparison ---------------------------------------------------------------

/// Initial Stokes problem of the physical setup on one level.
struct PhysicalProblem
{
    std::shared_ptr< fem::Discretization > discretization;
    physics::PhysicalParams                physics;
    int                                    level = 0;
    Vector                                 temperature;
    stokes::StokesSetup                    setup;
    stokes::StokesRhs                      rhs;
    Vector                                 u_int;
};

PhysicalProblem make_physical_problem( const RunConfig& cfg, int level );

struct BenchCase
{
    std::string          label;
    stokes::SolverConfig solver;
};

/// Every Uzawa variant with the mass, w-BFBT (symmetric and a_r = 10), and V-cycle BFBT approximations.
std::vector< BenchCase > bench_cases( const RunConfig& cfg );

struct BenchResult
{
    std::string                           label;
    std::string                           uzawa;
    std::string                           schur;
    bool                                  converged  = false;
    int                                   iterations = 0;
    double                                seconds    = 0.0;
    std::vector< stokes::IterationRecord > history;

    /// First iteration reaching the relative reduction, -1 if never reached.
    int iterations_to( double relative ) const;
};

BenchResult run_bench_case( const PhysicalProblem& problem, const BenchCase& c, const krylov::StoppingRule& stop, double budget );

std::vector< BenchResult > run_solver_bench( const RunConfig& cfg, const std::string& out_dir );

// ---- simulation ----------------------------------------------------------------------

struct SimulationOptions
{
    std::string checkpoint; // written every checkpoint_every steps and at the end
    std::string resume;
};

struct SimulationReport
{
    long        steps = 0;
    double      t     = 0.0;
    bool        failed = false;
    std::string message;
};

energy::SimulationContext simulation_context( const RunConfig& cfg, std::shared_ptr< const fem::Discretization > d );

double rms_velocity( const fem::Discretization& d, int level, const Vector& u );

SimulationReport run_simulation( const RunConfig& cfg, const SimulationOptions& opts );

} // namespace tala::app
