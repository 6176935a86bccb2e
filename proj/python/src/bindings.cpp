#include "tala/app/config.hpp"
#include "tala/app/runs.hpp"
#include "tala/energy/time_stepping.hpp"
#include "tala/physics/model.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tala;

PYBIND11_MODULE( _tala, m )
{
    m.doc() = "Matrix-free TALA mantle convection on a blended 2D annulus.";

    py::register_exception< app::ConfigError >( m, "ConfigError", PyExc_ValueError );
    py::register_exception< krylov::SolverFailure >( m, "SolverFailure", PyExc_RuntimeError );

    py::class_< physics::ReferenceConstants >( m, "ReferenceConstants" )
        .def( py::init<>() )
        .def_readwrite( "d", &physics::ReferenceConstants::d )
        .def_readwrite( "delta_T", &physics::ReferenceConstants::delta_T )
        .def_readwrite( "eta0", &physics::ReferenceConstants::eta0 )
        .def_readwrite( "rho0", &physics::ReferenceConstants::rho0 )
        .def_readwrite( "cp0", &physics::ReferenceConstants::cp0 )
        .def_readwrite( "alpha0", &physics::ReferenceConstants::alpha0 )
        .def_readwrite( "g0", &physics::ReferenceConstants::g0 )
        .def_readwrite( "u0", &physics::ReferenceConstants::u0 )
        .def_readwrite( "k0", &physics::ReferenceConstants::k0 )
        .def_readwrite( "gruneisen0", &physics::ReferenceConstants::gruneisen0 );

    py::class_< physics::DimensionlessNumbers >( m, "DimensionlessNumbers" )
        .def_readonly( "Ra", &physics::DimensionlessNumbers::Ra )
        .def_readonly( "Pe", &physics::DimensionlessNumbers::Pe )
        .def_readonly( "Di", &physics::DimensionlessNumbers::Di )
        .def_readonly( "gamma", &physics::DimensionlessNumbers::gamma )
        .def_readonly( "xi", &physics::DimensionlessNumbers::xi )
        .def_readonly( "kappa_d", &physics::DimensionlessNumbers::kappa_d )
        .def_readonly( "t0", &physics::DimensionlessNumbers::t0 )
        .def_readonly( "p0", &physics::DimensionlessNumbers::p0 )
        .def_readonly( "H0", &physics::DimensionlessNumbers::H0 )
        .def_readonly( "QL0", &physics::DimensionlessNumbers::QL0 )
        .def_readonly( "KT0", &physics::DimensionlessNumbers::KT0 )
        .def_readonly( "kappa_T0", &physics::DimensionlessNumbers::kappa_T0 );

    m.def( "nondimensionalize", &physics::nondimensionalize, py::arg( "reference" ) = physics::ReferenceConstants{} );

    py::class_< energy::BDF2Coefficients >( m, "BDF2Coefficients" )
        .def_readonly( "s_new", &energy::BDF2Coefficients::s_new )
        .def_readonly( "s_n", &energy::BDF2Coefficients::s_n )
        .def_readonly( "s_nm1", &energy::BDF2Coefficients::s_nm1 );
    m.def( "bdf2_coefficients", &energy::bdf2_coefficients, py::arg( "tau_new" ), py::arg( "tau_old" ) );

    py::class_< fem::ExpSurrogate >( m, "ExpSurrogate" )
        .def( py::init< double, double, int, double >(), py::arg( "z_min" ), py::arg( "z_max" ), py::arg( "degree" ) = 6,
              py::arg( "tolerance" ) = 6e-4 )
        .def( "__call__", &fem::ExpSurrogate::operator() )
        .def_property_readonly( "pieces", &fem::ExpSurrogate::pieces )
        .def_property_readonly( "degree", &fem::ExpSurrogate::degree )
        .def( "max_relative_error", &fem::ExpSurrogate::max_relative_error, py::arg( "samples" ) = 100000 );

    py::class_< app::RunConfig >( m, "RunConfig" )
        .def( py::init<>() )
        .def_readwrite( "mode", &app::RunConfig::mode )
        .def_readwrite( "seed", &app::RunConfig::seed )
        .def_readwrite( "threads", &app::RunConfig::threads )
        .def_property(
            "output_dir", []( const app::RunConfig& c ) { return c.output.dir; },
            []( app::RunConfig& c, const std::string& v ) { c.output.dir = v; } )
        .def_property(
            "l_max", []( const app::RunConfig& c ) { return c.mesh.l_max; }, []( app::RunConfig& c, int v ) { c.mesh.l_max = v; } )
        .def_property(
            "max_steps", []( const app::RunConfig& c ) { return c.time.max_steps; },
            []( app::RunConfig& c, long v ) { c.time.max_steps = v; } )
        .def( "validate", &app::RunConfig::validate )
        .def( "serialize", []( const app::RunConfig& c ) { return app::serialize_config( c ); } )
        .def( "__eq__", []( const app::RunConfig& a, const app::RunConfig& b ) { return a == b; } );

    m.def( "parse_config", &app::parse_config, py::arg( "text" ) );
    m.def( "load_config", &app::load_config, py::arg( "path" ) );

    m.def(
        "manufactured_error",
        []( int level, double k, int steps, bool exact_velocity ) {
            app::ConvergenceConfig cc;
            cc.exact_velocity = exact_velocity;
            const auto d      = app::make_discretization( 8, 2, cc.r_cmb, cc.r_surface, level + 1 );
            py::gil_scoped_release release;
            return app::manufactured_error( *d, level, cc, k, steps );
        },
        py::arg( "level" ), py::arg( "k" ), py::arg( "steps" ), py::arg( "exact_velocity" ) = true );

    m.def(
        "run_convergence_test",
        []( const app::RunConfig& cfg, const std::string& out_dir ) {
            app::ConvergenceReport rep;
            {
                py::gil_scoped_release release;
                rep = app::run_convergence_test( cfg, out_dir );
            }
            py::list fits;
            for ( const auto& f : rep.fits )
                fits.append( py::dict( py::arg( "k" ) = f.k, py::arg( "level" ) = f.level, py::arg( "slope" ) = f.slope,
                                       py::arg( "constant" ) = f.constant ) );
            return fits;
        },
        py::arg( "config" ), py::arg( "out_dir" ) );

    m.def(
        "run_solver_bench",
        []( const app::RunConfig& cfg, const std::string& out_dir ) {
            std::vector< app::BenchResult > res;
            {
                py::gil_scoped_release release;
                res = app::run_solver_bench( cfg, out_dir );
            }
            py::list out;
            for ( const auto& r : res )
                out.append( py::dict( py::arg( "label" ) = r.label, py::arg( "converged" ) = r.converged,
                                      py::arg( "iterations" ) = r.iterations, py::arg( "seconds" ) = r.seconds ) );
            return out;
        },
        py::arg( "config" ), py::arg( "out_dir" ) );

    m.def(
        "run_simulation",
        []( const app::RunConfig& cfg, const std::string& checkpoint, const std::string& resume ) {
            app::SimulationReport rep;
            {
                py::gil_scoped_release release;
                rep = app::run_simulation( cfg, { checkpoint, resume } );
            }
            return py::dict( py::arg( "steps" ) = rep.steps, py::arg( "t" ) = rep.t, py::arg( "failed" ) = rep.failed,
                             py::arg( "message" ) = rep.message );
        },
        py::arg( "config" ), py::arg( "checkpoint" ) = "", py::arg( "resume" ) = "" );
}
