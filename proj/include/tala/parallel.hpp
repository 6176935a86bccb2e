#pragma once

#include "tala/common.hpp"

namespace tala {

/// Worker threads used by element loops and vector reductions.
int  thread_count();
void set_thread_count( int n );

/// Chunked dot product; the chunk partition does not depend on the thread count,
/// so the result is bitwise identical for any number of threads.
double dot( const Vector& a, const Vector& b );
double norm( const Vector& a );
double sum( const Vector& a );

} // namespace tala
