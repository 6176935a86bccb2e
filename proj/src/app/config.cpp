#include "tala/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace tala::app {

namespace pt = boost::property_tree;

namespace {

std::string format( double v )
{
    char buf[32];
    std::snprintf( buf, sizeof( buf ), "%.17g", v );
    return buf;
}

std::string format( int v ) { return std::to_string( v ); }
std::string format( long v ) { return std::to_string( v ); }
std::string format( std::uint64_t v ) { return std::to_string( v ); }
std::string format( bool v ) { return v ? "true" : "false"; }
std::string format( const std::string& v ) { return v; }

template < typename T >
std::string format( const std::vector< T >& v )
{
    std::string s;
    for ( std::size_t i = 0; i < v.size(); ++i )
    {
        s += ( i ? ", " : "" ) + format( v[i] );
    }
    return s;
}

std::string trim( const std::string& s )
{
    const auto b = s.find_first_not_of( " \t" );
    const auto e = s.find_last_not_of( " \t" );
    return b == std::string::npos ? "" : s.substr( b, e - b + 1 );
}

void parse( const std::string& s, double& v )
{
    std::size_t pos = 0;
    v               = std::stod( s, &pos );
    if ( pos != s.size() )
        throw std::invalid_argument( s );
}

void parse( const std::string& s, int& v )
{
    std::size_t pos = 0;
    v               = std::stoi( s, &pos );
    if ( pos != s.size() )
        throw std::invalid_argument( s );
}

void parse( const std::string& s, long& v )
{
    std::size_t pos = 0;
    v               = std::stol( s, &pos );
    if ( pos != s.size() )
        throw std::invalid_argument( s );
}

void parse( const std::string& s, std::uint64_t& v )
{
    std::size_t pos = 0;
    v               = std::stoull( s, &pos );
    if ( pos != s.size() || s.find( '-' ) != std::string::npos )
        throw std::invalid_argument( s );
}

void parse( const std::string& s, bool& v )
{
    if ( s == "true" || s == "1" || s == "yes" || s == "on" )
        v = true;
    else if ( s == "false" || s == "0" || s == "no" || s == "off" )
        v = false;
    else
        throw std::invalid_argument( s );
}

void parse( const std::string& s, std::string& v )
{
    v = s;
}

template < typename T >
void parse( const std::string& s, std::vector< T >& v )
{
    v.clear();
    std::stringstream ss( s );
    std::string       item;
    while ( std::getline( ss, item, ',' ) )
    {
        T x{};
        parse( trim( item ), x );
        v.push_back( x );
    }
}

struct Field
{
    std::string                                             section;
    std::string                                             key;
    std::function< std::string( const RunConfig& ) >        get;
    std::function< void( RunConfig&, const std::string& ) > set;
};

template < typename Access >
Field field( const char* section, const char* key, Access access )
{
    return { section, key,
             [access]( const RunConfig& c ) { return format( access( const_cast< RunConfig& >( c ) ) ); },
             [access]( RunConfig& c, const std::string& s ) { parse( s, access( c ) ); } };
}

#define TALA_FIELD( section, key, member ) field( section, key, []( RunConfig& c ) -> auto& { return c.member; } )

const std::vector< Field >& fields()
{
    static const std::vector< Field > f = {
        TALA_FIELD( "run", "mode", mode ),
        TALA_FIELD( "run", "seed", seed ),
        TALA_FIELD( "run", "threads", threads ),

        TALA_FIELD( "mesh", "n_tangential", mesh.n_tangential ),
        TALA_FIELD( "mesh", "n_radial", mesh.n_radial ),
        TALA_FIELD( "mesh", "l_max", mesh.l_max ),
        TALA_FIELD( "mesh", "l_min", mesh.l_min ),
        TALA_FIELD( "mesh", "l_eta", mesh.l_eta ),
        TALA_FIELD( "mesh", "blending", mesh.blending ),

        { "solver", "uzawa", []( const RunConfig& c ) { return std::string( stokes::to_string( c.solver.uzawa ) ); },
          []( RunConfig& c, const std::string& s ) { c.solver.uzawa = stokes::parse_uzawa( s ); } },
        { "solver", "schur", []( const RunConfig& c ) { return std::string( stokes::to_string( c.solver.schur ) ); },
          []( RunConfig& c, const std::string& s ) { c.solver.schur = stokes::parse_schur( s ); } },
        TALA_FIELD( "solver", "sigma", solver.sigma ),
        TALA_FIELD( "solver", "omega", solver.omega ),
        TALA_FIELD( "solver", "tol_A", solver.tol_A ),
        TALA_FIELD( "solver", "m_A", solver.m_A ),
        TALA_FIELD( "solver", "deg_A", solver.deg_A ),
        TALA_FIELD( "solver", "tol_VBFBT", solver.tol_VBFBT ),
        TALA_FIELD( "solver", "tol_invMass", solver.tol_invMass ),
        TALA_FIELD( "solver", "tol_wBFBT", solver.tol_wBFBT ),
        TALA_FIELD( "solver", "m_V", solver.m_V ),
        TALA_FIELD( "solver", "deg_V", solver.deg_V ),
        TALA_FIELD( "solver", "tol_coarse", solver.tol_coarse ),
        TALA_FIELD( "solver", "tol_up", solver.tol_up ),
        TALA_FIELD( "solver", "tol_T", solver.tol_T ),
        TALA_FIELD( "solver", "tol_VectorMass", solver.tol_VectorMass ),
        TALA_FIELD( "solver", "a_r", solver.a_r ),
        TALA_FIELD( "solver", "a_l", solver.a_l ),
        TALA_FIELD( "solver", "compressible_pressure_update", solver.compressible_pressure_update ),
        TALA_FIELD( "solver", "max_outer", solver.max_outer ),
        TALA_FIELD( "solver", "restart", solver.restart ),
        TALA_FIELD( "solver", "max_inner", solver.max_inner ),
        TALA_FIELD( "solver", "power_iterations", solver.power_iterations ),

        TALA_FIELD( "physics", "d", reference.d ),
        TALA_FIELD( "physics", "delta_T", reference.delta_T ),
        TALA_FIELD( "physics", "eta0", reference.eta0 ),
        TALA_FIELD( "physics", "rho0", reference.rho0 ),
        TALA_FIELD( "physics", "cp0", reference.cp0 ),
        TALA_FIELD( "physics", "alpha0", reference.alpha0 ),
        TALA_FIELD( "physics", "g0", reference.g0 ),
        TALA_FIELD( "physics", "u0", reference.u0 ),
        TALA_FIELD( "physics", "k0", reference.k0 ),
        TALA_FIELD( "physics", "gruneisen0", reference.gruneisen0 ),
        TALA_FIELD( "physics", "r_surface", reference.r_surface ),
        TALA_FIELD( "physics", "r_cmb", reference.r_cmb ),
        TALA_FIELD( "physics", "T_surface", reference.T_surface ),
        TALA_FIELD( "physics", "T_cmb", reference.T_cmb ),
        TALA_FIELD( "physics", "rho_top", reference.rho_top ),
        TALA_FIELD( "physics", "T_adiabatic", reference.T_adiabatic ),

        TALA_FIELD( "model", "include_lhs_advection", model.include_lhs_advection ),
        TALA_FIELD( "model", "shear_cutoff", model.shear_cutoff ),
        TALA_FIELD( "model", "use_surrogate", model.use_surrogate ),
        TALA_FIELD( "model", "buoyancy", model.buoyancy ),
        TALA_FIELD( "model", "linearized_shear", model.linearized_shear ),
        TALA_FIELD( "model", "initial_noise", model.initial_noise ),

        TALA_FIELD( "time", "C_CFL", time.C_CFL ),
        TALA_FIELD( "time", "tau_max", time.tau_max ),
        TALA_FIELD( "time", "T_end", time.T_end ),
        TALA_FIELD( "time", "max_steps", time.max_steps ),
        TALA_FIELD( "time", "wall_budget", time.wall_budget ),

        TALA_FIELD( "output", "dir", output.dir ),
        TALA_FIELD( "output", "vtk_every", output.vtk_every ),
        TALA_FIELD( "output", "checkpoint_every", output.checkpoint_every ),

        TALA_FIELD( "convergence", "k", convergence.k ),
        TALA_FIELD( "convergence", "levels", convergence.levels ),
        TALA_FIELD( "convergence", "steps", convergence.steps ),
        TALA_FIELD( "convergence", "r_cmb", convergence.r_cmb ),
        TALA_FIELD( "convergence", "r_surface", convergence.r_surface ),
        TALA_FIELD( "convergence", "t_start", convergence.t_start ),
        TALA_FIELD( "convergence", "t_end", convergence.t_end ),
        TALA_FIELD( "convergence", "tol_T", convergence.tol_T ),
        TALA_FIELD( "convergence", "relative", convergence.relative ),
        TALA_FIELD( "convergence", "exact_velocity", convergence.exact_velocity ),
        TALA_FIELD( "convergence", "linearized_shear", convergence.linearized_shear ),
        TALA_FIELD( "convergence", "wall_budget", convergence.wall_budget ),

        TALA_FIELD( "bench", "level", bench.level ),
        TALA_FIELD( "bench", "absolute", bench.absolute ),
        TALA_FIELD( "bench", "max_iterations", bench.max_iterations ),
        TALA_FIELD( "bench", "omega_wbfbt", bench.omega_wbfbt ),
        TALA_FIELD( "bench", "run_budget", bench.run_budget ),
        TALA_FIELD( "bench", "wall_budget", bench.wall_budget ),
    };
    return f;
}

#undef TALA_FIELD

} // namespace

void RunConfig::validate() const
{
    static const std::set< std::string > modes = { "convergence-test", "solver-bench", "simulate" };
    if ( !modes.count( mode ) )
        throw ConfigError( "unknown mode '" + mode + "'" );
    if ( mesh.n_tangential < 3 || mesh.n_radial < 1 )
        throw ConfigError( "mesh needs n_tangential >= 3 and n_radial >= 1" );
    if ( !( 0 <= mesh.l_min && mesh.l_min <= mesh.l_eta && mesh.l_eta <= mesh.l_max ) )
        throw ConfigError( "levels must satisfy 0 <= l_min <= l_eta <= l_max" );
    if ( threads < 0 )
        throw ConfigError( "threads must be non-negative" );
    if ( !( time.C_CFL > 0 && time.tau_max > 0 && time.T_end >= 0 && time.max_steps >= 0 && time.wall_budget >= 0 ) )
        throw ConfigError( "time settings must be positive" );
    if ( output.vtk_every < 0 || output.checkpoint_every < 0 )
        throw ConfigError( "output cadences must be non-negative" );
    if ( !( model.initial_noise >= 0 && model.initial_noise < 1 ) )
        throw ConfigError( "initial_noise must lie in [0, 1)" );
    if ( convergence.k.empty() || convergence.levels.empty() || convergence.steps.size() < 2 )
        throw ConfigError( "convergence test needs k values, levels and at least two step counts" );
    for ( double k : convergence.k )
        if ( !( k > 0 ) )
            throw ConfigError( "convergence k must be positive" );
    for ( int s : convergence.steps )
        if ( s < 1 )
            throw ConfigError( "convergence step counts must be positive" );
    for ( int l : convergence.levels )
        if ( l < 0 )
            throw ConfigError( "convergence levels must be non-negative" );
    if ( !( 0 < convergence.r_cmb && convergence.r_cmb < convergence.r_surface && convergence.t_start < convergence.t_end ) )
        throw ConfigError( "convergence domain or interval is empty" );
    if ( !( convergence.tol_T >= 0 && convergence.relative >= 0 && convergence.tol_T + convergence.relative > 0 ) )
        throw ConfigError( "convergence tolerances must be non-negative and not both zero" );
    if ( bench.level < 1 || bench.absolute <= 0 || bench.max_iterations < 1 || bench.omega_wbfbt <= 0 )
        throw ConfigError( "invalid bench settings" );
    try
    {
        solver.validate();
        reference.validate();
    }
    catch ( const std::exception& e )
    {
        throw ConfigError( e.what() );
    }
}

RunConfig parse_config( const std::string& text )
{
    pt::ptree tree;
    try
    {
        std::istringstream in( text );
        pt::read_ini( in, tree );
    }
    catch ( const pt::ini_parser_error& e )
    {
        throw ConfigError( std::string( "malformed config: " ) + e.what() );
    }

    std::map< std::string, const Field* > index;
    for ( const auto& f : fields() )
        index[f.section + "." + f.key] = &f;

    RunConfig cfg;
    for ( const auto& [section, body] : tree )
    {
        if ( body.empty() )
            throw ConfigError( "key '" + section + "' outside of a section" );
        for ( const auto& [key, value] : body )
        {
            const auto it = index.find( section + "." + key );
            if ( it == index.end() )
                throw ConfigError( "unknown config key [" + section + "] " + key );
            try
            {
                const std::string& raw = value.data();
                it->second->set( cfg, trim( raw.substr( 0, raw.find_first_of( ";#" ) ) ) );
            }
            catch ( const std::exception& )
            {
                throw ConfigError( "bad value for [" + section + "] " + key + ": '" + value.data() + "'" );
            }
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw ConfigError( "cannot read config file " + path );
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config( ss.str() );
}

std::string serialize_config( const RunConfig& cfg )
{
    std::string out, current;
    for ( const auto& f : fields() )
    {
        if ( f.section != current )
        {
            out += ( current.empty() ? "" : "\n" ) + std::string( "[" ) + f.section + "]\n";
            current = f.section;
        }
        out += f.key + " = " + f.get( cfg ) + "\n";
    }
    return out;
}

bool operator==( const RunConfig& a, const RunConfig& b )
{
    for ( const auto& f : fields() )
        if ( f.get( a ) != f.get( b ) )
            return false;
    return true;
}

} // namespace tala::app
