#pragma once

#include "tala/fem/space.hpp"

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace tala::app {

/// CSV file; every row is flushed as soon as it is written.
class CsvWriter
{
 public:
    CsvWriter( const std::string& path, const std::vector< std::string >& header, bool append = false );

    void row( const std::vector< std::string >& cells );

    static std::string cell( double v );
    static std::string cell( long v );
    static std::string cell( int v ) { return cell( static_cast< long >( v ) ); }

 private:
    std::ofstream out_;
};

/// P1 field of a level evaluated at the P2 nodes of that level.
Vector p1_at_p2_nodes( const fem::Discretization& d, int level, const Vector& p );

/// Legacy ASCII VTK of the P2 nodes (each element split into four linear triangles).
void write_vtk( const std::string& path, const fem::Discretization& d, int level, const std::map< std::string, Vector >& scalars,
                const std::map< std::string, Vector >& vectors );

/// Creates the directory (and parents) if needed.
void ensure_directory( const std::string& dir );

} // namespace tala::app
