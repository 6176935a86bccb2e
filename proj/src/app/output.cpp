#include "tala/app/output.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace tala::app {

using fem::SpaceKind;

CsvWriter::CsvWriter( const std::string& path, const std::vector< std::string >& header, bool append )
{
    const bool exists = append && std::filesystem::exists( path ) && std::filesystem::file_size( path ) > 0;
    out_.open( path, append ? std::ios::app : std::ios::trunc );
    if ( !out_ )
        throw std::runtime_error( "cannot open " + path );
    if ( !exists )
        row( header );
}

void CsvWriter::row( const std::vector< std::string >& cells )
{
    std::string line;
    for ( std::size_t i = 0; i < cells.size(); ++i )
        line += ( i ? "," : "" ) + cells[i];
    line += '\n';
    out_ << line << std::flush;
}

std::string CsvWriter::cell( double v )
{
    char buf[32];
    std::snprintf( buf, sizeof( buf ), "%.10g", v );
    return buf;
}

std::string CsvWriter::cell( long v )
{
    return std::to_string( v );
}

Vector p1_at_p2_nodes( const fem::Discretization& d, int level, const Vector& p )
{
    require( p.size() == d.num_nodes( SpaceKind::P1, level ), "pressure must be a P1 field on the level" );
    const auto& lm = d.mesh().level( level );
    Vector      out( d.num_nodes( SpaceKind::P2, level ) );
    for ( int e = 0; e < lm.num_elements(); ++e )
    {
        const auto& v = lm.p1_nodes[e];
        const auto& n = lm.p2_nodes[e];
        for ( int k = 0; k < 3; ++k )
        {
            out[n[k]]     = p[v[k]];
            out[n[3 + k]] = 0.5 * ( p[v[k]] + p[v[( k + 1 ) % 3]] );
        }
    }
    return out;
}

void write_vtk( const std::string& path, const fem::Discretization& d, int level, const std::map< std::string, Vector >& scalars,
                const std::map< std::string, Vector >& vectors )
{
    const auto&   pos = d.node_grid( SpaceKind::P2, level ).physical;
    const auto&   lm  = d.mesh().level( level );
    const int     n   = static_cast< int >( pos.size() );
    std::ofstream f( path );
    if ( !f )
        throw std::runtime_error( "cannot open " + path );
    f.precision( 10 );
    f << "# vtk DataFile Version 3.0\ntala fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    f << "POINTS " << n << " double\n";
    for ( const auto& x : pos )
        f << x.x() << ' ' << x.y() << " 0\n";

    static const int sub[4][3] = { { 0, 3, 5 }, { 3, 1, 4 }, { 5, 4, 2 }, { 3, 4, 5 } };
    const int        cells     = 4 * lm.num_elements();
    f << "CELLS " << cells << ' ' << 4 * cells << '\n';
    for ( int e = 0; e < lm.num_elements(); ++e )
        for ( const auto& s : sub )
            f << "3 " << lm.p2_nodes[e][s[0]] << ' ' << lm.p2_nodes[e][s[1]] << ' ' << lm.p2_nodes[e][s[2]] << '\n';
    f << "CELL_TYPES " << cells << '\n';
    for ( int c = 0; c < cells; ++c )
        f << "5\n";

    f << "POINT_DATA " << n << '\n';
    for ( const auto& [name, v] : scalars )
    {
        require( v.size() == n, "VTK scalar field must live on the P2 nodes" );
        f << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for ( int i = 0; i < n; ++i )
            f << v[i] << '\n';
    }
    for ( const auto& [name, v] : vectors )
    {
        require( v.size() == 2 * n, "VTK vector field must be a P2 vector field" );
        f << "VECTORS " << name << " double\n";
        for ( int i = 0; i < n; ++i )
            f << v[i] << ' ' << v[n + i] << " 0\n";
    }
}

void ensure_directory( const std::string& dir )
{
    if ( !dir.empty() )
        std::filesystem::create_directories( dir );
}

} // namespace tala::app
