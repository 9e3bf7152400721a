#pragma once

#include "dphls/kernel_spec.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dphls {

struct FastaRecord {
  std::string id;
  std::string sequence;
  friend bool operator==(const FastaRecord&, const FastaRecord&) = default;
};

/// Throws MalformedFasta (with the 1-based line) or EmptyFile.
std::vector<FastaRecord> parse_fasta_text(std::string_view text);
std::vector<FastaRecord> parse_fasta(const std::filesystem::path& path);
std::string serialize_fasta(std::span<const FastaRecord> records, int line_width = 60);

/// Whitespace matrix format: optional '#' comments, a header of residue
/// letters, then one row per residue led by its letter. The result is indexed
/// by the library's residue order (ACGT, ACGT plus N/'-', or the 20 amino
/// acids); extra ambiguity columns (B Z X * J O) are dropped.
/// Throws MatrixShapeMismatch or UnknownResidue.
Eigen::MatrixXd parse_matrix_text(std::string_view text);
Eigen::MatrixXd parse_matrix(const std::filesystem::path& path);
std::string serialize_matrix(const Eigen::MatrixXd& matrix);

struct SequenceRecord {
  std::string id;
  Sequence symbols;
};

/// Sample files: one sample per line ("re,im" complex, a single integer, or
/// five tab-separated profile frequencies). Lines starting with '>' open a new
/// record; samples before any header form a record named "record1".
/// Throws MalformedSample (with the 1-based line) or EmptyFile.
std::vector<SequenceRecord> parse_signal_text(std::string_view text, SymbolKind kind);
std::vector<SequenceRecord> parse_signal(const std::filesystem::path& path, SymbolKind kind);
std::string serialize_signal(std::span<const SequenceRecord> records);

/// FASTA for letter kinds, sample files otherwise.
std::vector<SequenceRecord> load_sequences(const std::filesystem::path& path, SymbolKind kind);

/// Run-length move string such as "4M2I3M"; "*" for an empty path.
std::string to_cigar(std::span<const TracebackMove> moves);
/// Inverse of to_cigar; the result ends with END.
std::vector<TracebackMove> parse_cigar(std::string_view cigar);

std::string read_file(const std::filesystem::path& path);

}  // namespace dphls
