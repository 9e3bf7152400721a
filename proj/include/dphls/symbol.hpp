#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace dphls {

using ProfileVector = Eigen::Matrix<double, 5, 1>;

struct Nucleotide {
  std::uint8_t code = 0;  // A,C,G,T -> 0..3
  friend bool operator==(Nucleotide, Nucleotide) = default;
};

struct AmbiguousNucleotide {
  std::uint8_t code = 0;  // A,C,G,T -> 0..3, N or '-' -> 4
  friend bool operator==(AmbiguousNucleotide, AmbiguousNucleotide) = default;
};

struct AminoAcid {
  std::uint8_t code = 0;  // index into kAminoAcids
  friend bool operator==(AminoAcid, AminoAcid) = default;
};

/// Column of a nucleotide profile: frequencies of A, C, G, T and gap.
struct ProfileColumn {
  ProfileVector freq = ProfileVector::Zero();
  friend bool operator==(const ProfileColumn& a, const ProfileColumn& b) { return a.freq == b.freq; }
};

struct ComplexSample {
  double re = 0.0;
  double im = 0.0;
  friend bool operator==(ComplexSample, ComplexSample) = default;
};

struct IntSample {
  std::int32_t value = 0;
  friend bool operator==(IntSample, IntSample) = default;
};

using Symbol = std::variant<Nucleotide, AmbiguousNucleotide, AminoAcid, ProfileColumn, ComplexSample, IntSample>;
using Sequence = std::vector<Symbol>;
using SequenceView = std::span<const Symbol>;

enum class SymbolKind { Nucleotide, AmbiguousNucleotide, AminoAcid, ProfileColumn, ComplexSample, IntSample };

std::string_view to_string(SymbolKind kind);
SymbolKind kind_of(const Symbol& s);

/// One-letter amino-acid codes in alphabetical order; a residue's code is its
/// index here.
inline constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr std::string_view kNucleotides = "ACGT";

/// Map text to symbols. Case-insensitive; U folds to T. Throws Error with
/// InvalidCharacter or EmptySequence. Only letter-based kinds are accepted.
Sequence encode_sequence(std::string_view text, SymbolKind kind);

/// Inverse of encode_sequence for letter-based kinds (upper case, T not U).
std::string decode_sequence(SequenceView seq);

/// Rescale a profile column so its entries sum to one (no-op on all-zero).
ProfileColumn normalized(const ProfileColumn& col);

}  // namespace dphls
