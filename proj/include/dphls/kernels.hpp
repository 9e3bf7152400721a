#pragma once

#include "dphls/kernel_spec.hpp"

#include <map>
#include <string_view>

namespace dphls {

/// Pointer encodings shared by the shipped kernels.
namespace tbp {

// Single-layer kernels (2 bits).
inline constexpr TracebackPointer kEnd = 0;
inline constexpr TracebackPointer kDiag = 1;
inline constexpr TracebackPointer kUp = 2;
inline constexpr TracebackPointer kLeft = 3;

// Affine kernels (4 bits): bits 0-1 hold the H source (codes above), bit 2 is
// set when I extended I(i, j-1), bit 3 when D extended D(i-1, j).
inline constexpr TracebackPointer kInsExtend = 1u << 2;
inline constexpr TracebackPointer kDelExtend = 1u << 3;

// Two-piece kernels (7 bits): bits 0-2 hold the H source, bits 3-6 the extend
// flags of I1, D1, I2, D2.
inline constexpr TracebackPointer kSrcIns1 = 2;
inline constexpr TracebackPointer kSrcDel1 = 3;
inline constexpr TracebackPointer kSrcIns2 = 4;
inline constexpr TracebackPointer kSrcDel2 = 5;
inline constexpr TracebackPointer kIns1Extend = 1u << 3;
inline constexpr TracebackPointer kDel1Extend = 1u << 4;
inline constexpr TracebackPointer kIns2Extend = 1u << 5;
inline constexpr TracebackPointer kDel2Extend = 1u << 6;

}  // namespace tbp

/// Layer indices.
namespace layer {
inline constexpr int H = 0;
inline constexpr int I = 1;   // horizontal gap (left neighbour)
inline constexpr int D = 2;   // vertical gap (up neighbour)
inline constexpr int I2 = 3;  // long horizontal gap
inline constexpr int D2 = 4;  // long vertical gap
// pair-HMM layers of the Viterbi kernel
inline constexpr int M = 0;
inline constexpr int X = 1;  // gap in reference: consumes query (up)
inline constexpr int Y = 2;  // gap in query: consumes reference (left)
}  // namespace layer

inline constexpr int kDefaultBand = 32;

KernelSpec<Sat32> kernel_global_linear();                                   // #1
KernelSpec<Sat32> kernel_global_affine();                                   // #2
KernelSpec<Sat32> kernel_local_linear();                                    // #3
KernelSpec<Sat32> kernel_local_affine();                                    // #4
KernelSpec<Sat32> kernel_global_two_piece();                                // #5
KernelSpec<Sat32> kernel_overlap();                                         // #6
KernelSpec<Sat32> kernel_semiglobal();                                      // #7
KernelSpec<double> kernel_profile();                                        // #8
KernelSpec<double> kernel_dtw();                                            // #9
KernelSpec<double> kernel_viterbi();                                        // #10
KernelSpec<Sat32> kernel_banded_global_linear(int band = kDefaultBand);     // #11
KernelSpec<Sat32> kernel_banded_local_affine(int band = kDefaultBand);      // #12
KernelSpec<Sat32> kernel_banded_global_two_piece(int band = kDefaultBand);  // #13
KernelSpec<Sat32> kernel_sdtw(bool with_traceback = false);                 // #14
KernelSpec<Sat32> kernel_protein_local();                                   // #15

using KernelCatalog = std::map<int, AnyKernel>;

/// The fifteen shipped kernels keyed by id.
const KernelCatalog& kernel_catalog();

/// Look up by numeric id ("3") or name ("local_linear"). Throws UnknownKernel.
const AnyKernel& find_kernel(std::string_view id_or_name);

/// Distance between two signal samples under a metric.
double sample_distance(const ComplexSample& a, const ComplexSample& b, DistanceMetric m);

}  // namespace dphls
