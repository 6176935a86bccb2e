#pragma once

#include "tala/physics/model.hpp"
#include "tala/stokes/solver.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tala::app {

class ConfigError : public std::runtime_error
{
 public:
    explicit ConfigError( const std::string& what )
    : std::runtime_error( what )
    {}
};

struct MeshConfig
{
    int  n_tangential = 8;
    int  n_radial     = 2;
    int  l_max        = 4;
    int  l_min        = 1;
    int  l_eta        = 2;
    bool blending     = true;
};

struct ModelConfig
{
    bool   include_lhs_advection = true;
    bool   shear_cutoff          = true;
    bool   use_surrogate         = false;
    bool   buoyancy              = true;
    bool   linearized_shear      = true;
    double initial_noise         = 0.03; // relative
};

struct TimeConfig
{
    double C_CFL       = 1.0;
    double tau_max     = 1e-3;
    double T_end       = 1e-2;
    long   max_steps   = 1000000;
    double wall_budget = 0.0; // seconds, 0 = unlimited
};

struct OutputConfig
{
    std::string dir              = "output";
    int         vtk_every        = 10;
    int         checkpoint_every = 10;
};

struct ConvergenceConfig
{
    std::vector< double > k         = { 0.1 };
    std::vector< int >    levels    = { 5 };
    std::vector< int >    steps     = { 8, 16, 32, 64 };
    double                r_cmb     = 0.5;
    double                r_surface = 1.5;
    double                t_start   = 3.5;
    double                t_end     = 4.5;
    double                tol_T     = 1e-12;
    double                relative  = 1e-10; // temperature solve, alternative to tol_T
    bool                  exact_velocity = true; // u* = u(t^{n+1}) instead of the extrapolation
    bool                  linearized_shear = true;
    double                wall_budget = 1800.0;
};

struct BenchConfig
{
    int    level          = 3;
    double absolute       = 1e-8;
    int    max_iterations = 300;
    double omega_wbfbt    = 0.0125;
    double run_budget     = 600.0; // seconds per solver combination
    double wall_budget    = 1800.0;
};

struct RunConfig
{
    std::string                   mode = "simulate";
    MeshConfig                    mesh;
    stokes::SolverConfig          solver;
    physics::ReferenceConstants   reference;
    ModelConfig                   model;
    TimeConfig                    time;
    OutputConfig                  output;
    ConvergenceConfig             convergence;
    BenchConfig                   bench;
    std::uint64_t                 seed    = 1;
    int                           threads = 0; // 0 = runtime default

    void validate() const;
};

/// INI text with [section] headers and key = value lines. Unknown keys are rejected.
RunConfig   parse_config( const std::string& text );
RunConfig   load_config( const std::string& path );
std::string serialize_config( const RunConfig& cfg );

bool operator==( const RunConfig& a, const RunConfig& b );

} // namespace tala::app
