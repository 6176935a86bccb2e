#include "tala/parallel.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tala {

namespace {

constexpr Eigen::Index chunk = 2048;

template < typename F >
double chunked_sum( Eigen::Index n, F&& term )
{
    const Eigen::Index  chunks = ( n + chunk - 1 ) / chunk;
    std::vector< double > partial( static_cast< std::size_t >( chunks ), 0.0 );
#pragma omp parallel for schedule( static )
    for ( Eigen::Index c = 0; c < chunks; ++c )
    {
        const Eigen::Index begin = c * chunk;
        const Eigen::Index end   = std::min( n, begin + chunk );
        double             s     = 0.0;
        for ( Eigen::Index i = begin; i < end; ++i )
        {
            s += term( i );
        }
        partial[static_cast< std::size_t >( c )] = s;
    }
    double total = 0.0;
    for ( double p : partial )
    {
        total += p;
    }
    return total;
}

} // namespace

int thread_count()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_thread_count( int n )
{
#ifdef _OPENMP
    omp_set_num_threads( n > 0 ? n : 1 );
#else
    (void) n;
#endif
}

double dot( const Vector& a, const Vector& b )
{
    require( a.size() == b.size(), "dot product of vectors with different sizes" );
    const double* pa = a.data();
    const double* pb = b.data();
    return chunked_sum( a.size(), [pa, pb]( Eigen::Index i ) { return pa[i] * pb[i]; } );
}

double norm( const Vector& a )
{
    return std::sqrt( dot( a, a ) );
}

double sum( const Vector& a )
{
    const double* pa = a.data();
    return chunked_sum( a.size(), [pa]( Eigen::Index i ) { return pa[i]; } );
}

} // namespace tala
