#include "dphls/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace dphls {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < text.size()) lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  return lines;
}

std::vector<std::string_view> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = s.find_first_not_of(seps, pos);
    if (start == std::string_view::npos) break;
    const std::size_t end = s.find_first_of(seps, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    pos = end == std::string_view::npos ? s.size() : end;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

bool is_letter_kind(SymbolKind kind) {
  return kind == SymbolKind::Nucleotide || kind == SymbolKind::AmbiguousNucleotide || kind == SymbolKind::AminoAcid;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- FASTA

std::vector<FastaRecord> parse_fasta_text(std::string_view text) {
  std::vector<FastaRecord> records;
  const auto lines = split_lines(text);
  bool seen_content = false;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = trim(lines[n]);
    if (line.empty()) continue;
    seen_content = true;
    if (line.front() == '>') {
      records.push_back({std::string(trim(line.substr(1))), {}});
      continue;
    }
    if (records.empty()) throw Error(ErrorCode::MalformedFasta, "line " + std::to_string(n + 1) + ": expected '>'");
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) records.back().sequence.push_back(c);
  }
  if (!seen_content) throw Error(ErrorCode::EmptyFile, "no FASTA records");
  return records;
}

std::vector<FastaRecord> parse_fasta(const std::filesystem::path& path) { return parse_fasta_text(read_file(path)); }

std::string serialize_fasta(std::span<const FastaRecord> records, int line_width) {
  std::string out;
  const auto width = static_cast<std::size_t>(std::max(1, line_width));
  for (const auto& r : records) {
    out += '>';
    out += r.id;
    out += '\n';
    for (std::size_t pos = 0; pos < r.sequence.size(); pos += width) {
      out += r.sequence.substr(pos, width);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------- matrices

namespace {

constexpr std::string_view kIgnoredResidues = "BZX*JO";

int matrix_index(char letter, int size) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
  if (size == 20) {
    const auto pos = kAminoAcids.find(up);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
  }
  const char base = up == 'U' ? 'T' : up;
  const auto pos = kNucleotides.find(base);
  if (pos != std::string_view::npos) return static_cast<int>(pos);
  if (size == 5 && (up == 'N' || up == '-')) return 4;
  return -1;
}

}  // namespace

Eigen::MatrixXd parse_matrix_text(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    rows.push_back(split_any(line, " \t"));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no matrix rows");

  const auto& header = rows.front();
  std::vector<char> letters;
  for (auto tok : header) {
    if (tok.size() != 1) throw Error(ErrorCode::MatrixShapeMismatch, "header entries must be single letters");
    letters.push_back(tok.front());
  }
  auto keep = [](char c) { return kIgnoredResidues.find(static_cast<char>(std::toupper(static_cast<unsigned char>(c)))) == std::string_view::npos; };
  const int kept = static_cast<int>(std::count_if(letters.begin(), letters.end(), keep));

  bool protein = false;
  for (char c : letters)
    if (keep(c) && matrix_index(c, 5) < 0) protein = true;
  const int size = protein ? 20 : (kept == 4 ? 4 : 5);
  if (kept != size) {
    // every kept letter must be known before the shape can be judged
    for (char c : letters)
      if (keep(c) && matrix_index(c, size) < 0)
        throw Error(ErrorCode::UnknownResidue, std::string("unknown residue '") + c + "'");
    throw Error(ErrorCode::MatrixShapeMismatch, "header has " + std::to_string(kept) + " residues");
  }

  std::vector<int> column_index(letters.size());
  std::vector<bool> seen_col(static_cast<std::size_t>(size), false);
  for (std::size_t k = 0; k < letters.size(); ++k) {
    if (!keep(letters[k])) {
      column_index[k] = -1;
      continue;
    }
    const int idx = matrix_index(letters[k], size);
    if (idx < 0) throw Error(ErrorCode::UnknownResidue, std::string("unknown residue '") + letters[k] + "'");
    if (seen_col[static_cast<std::size_t>(idx)]) throw Error(ErrorCode::MatrixShapeMismatch, "duplicate column");
    seen_col[static_cast<std::size_t>(idx)] = true;
    column_index[k] = idx;
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  std::vector<bool> seen_row(static_cast<std::size_t>(size), false);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.front().size() != 1) throw Error(ErrorCode::MatrixShapeMismatch, "row label must be a single letter");
    const char label = row.front().front();
    if (!keep(label)) continue;
    const int ri = matrix_index(label, size);
    if (ri < 0) throw Error(ErrorCode::UnknownResidue, std::string("unknown residue '") + label + "'");
    if (row.size() != letters.size() + 1)
      throw Error(ErrorCode::MatrixShapeMismatch, std::string("row '") + label + "' has " +
                                                      std::to_string(row.size() - 1) + " values, header has " +
                                                      std::to_string(letters.size()));
    if (seen_row[static_cast<std::size_t>(ri)]) throw Error(ErrorCode::MatrixShapeMismatch, "duplicate row");
    seen_row[static_cast<std::size_t>(ri)] = true;
    for (std::size_t k = 0; k < letters.size(); ++k) {
      if (column_index[k] < 0) continue;
      double v = 0;
      if (!parse_number(row[k + 1], v))
        throw Error(ErrorCode::MatrixShapeMismatch, "non-numeric entry in row '" + std::string(1, label) + "'");
      m(ri, column_index[k]) = v;
    }
  }
  if (std::count(seen_row.begin(), seen_row.end(), true) != size)
    throw Error(ErrorCode::MatrixShapeMismatch, "matrix has fewer rows than header residues");
  return m;
}

Eigen::MatrixXd parse_matrix(const std::filesystem::path& path) { return parse_matrix_text(read_file(path)); }

std::string serialize_matrix(const Eigen::MatrixXd& matrix) {
  std::string letters;
  switch (matrix.rows()) {
    case 4: letters = "ACGT"; break;
    case 5: letters = "ACGT-"; break;
    case 20: letters = std::string(kAminoAcids); break;
    default: throw Error(ErrorCode::MatrixShapeMismatch, "matrix must be 4x4, 5x5 or 20x20");
  }
  if (matrix.cols() != matrix.rows()) throw Error(ErrorCode::MatrixShapeMismatch, "matrix must be square");
  std::string out = " ";
  for (char c : letters) {
    out += ' ';
    out += c;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out += letters[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out += ' ';
      out += format_double(matrix(i, j));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- signals

std::vector<SequenceRecord> parse_signal_text(std::string_view text, SymbolKind kind) {
  if (is_letter_kind(kind)) throw Error(ErrorCode::SymbolKindMismatch, "letter sequences are read as FASTA");
  std::vector<SequenceRecord> records;
  const auto lines = split_lines(text);
  auto malformed = [](std::size_t n, std::string_view why) {
    return Error(ErrorCode::MalformedSample, "line " + std::to_string(n + 1) + ": " + std::string(why));
  };

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = trim(lines[n]);
    if (line.empty()) continue;
    if (line.front() == '>') {
      records.push_back({std::string(trim(line.substr(1))), {}});
      continue;
    }
    if (records.empty()) records.push_back({"record1", {}});
    auto& out = records.back().symbols;
    switch (kind) {
      case SymbolKind::ComplexSample: {
        const auto fields = split_any(line, ",");
        ComplexSample s;
        if (fields.size() != 2 || !parse_number(fields[0], s.re) || !parse_number(fields[1], s.im))
          throw malformed(n, "expected 're,im'");
        out.emplace_back(s);
        break;
      }
      case SymbolKind::IntSample: {
        IntSample s;
        if (!parse_number(line, s.value)) throw malformed(n, "expected an integer");
        out.emplace_back(s);
        break;
      }
      case SymbolKind::ProfileColumn: {
        const auto fields = split_any(line, "\t ");
        if (fields.size() != 5)
          throw Error(ErrorCode::MalformedSample,
                      "line " + std::to_string(n + 1) + ": profile columns need 5 entries, got " +
                          std::to_string(fields.size()));
        ProfileColumn col;
        for (int k = 0; k < 5; ++k) {
          double v = 0;
          if (!parse_number(fields[static_cast<std::size_t>(k)], v) || v < 0) throw malformed(n, "bad frequency");
          col.freq(k) = v;
        }
        out.emplace_back(col);
        break;
      }
      default: throw malformed(n, "unsupported sample kind");
    }
  }
  if (records.empty()) throw Error(ErrorCode::EmptyFile, "no samples");
  return records;
}

std::vector<SequenceRecord> parse_signal(const std::filesystem::path& path, SymbolKind kind) {
  return parse_signal_text(read_file(path), kind);
}

std::string serialize_signal(std::span<const SequenceRecord> records) {
  std::string out;
  for (const auto& rec : records) {
    out += '>' + rec.id + '\n';
    for (const auto& sym : rec.symbols) {
      if (const auto* c = std::get_if<ComplexSample>(&sym)) {
        out += format_double(c->re) + ',' + format_double(c->im);
      } else if (const auto* s = std::get_if<IntSample>(&sym)) {
        out += std::to_string(s->value);
      } else if (const auto* p = std::get_if<ProfileColumn>(&sym)) {
        for (int k = 0; k < 5; ++k) {
          if (k) out += '\t';
          out += format_double(p->freq(k));
        }
      } else {
        throw Error(ErrorCode::SymbolKindMismatch, "letter symbols are written as FASTA");
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<SequenceRecord> load_sequences(const std::filesystem::path& path, SymbolKind kind) {
  if (!is_letter_kind(kind)) return parse_signal(path, kind);
  std::vector<SequenceRecord> out;
  for (auto& rec : parse_fasta(path)) {
    try {
      out.push_back({rec.id, encode_sequence(rec.sequence, kind)});
    } catch (const Error& e) {
      throw Error(e.code(), "record '" + rec.id + "': " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------- CIGAR

std::string to_cigar(std::span<const TracebackMove> moves) {
  std::string out;
  std::size_t k = 0;
  while (k < moves.size() && moves[k] != TracebackMove::END) {
    const TracebackMove m = moves[k];
    std::size_t run = 0;
    while (k < moves.size() && moves[k] == m) {
      ++run;
      ++k;
    }
    out += std::to_string(run);
    out += m == TracebackMove::MMI ? 'M' : (m == TracebackMove::INS ? 'I' : 'D');
  }
  return out.empty() ? "*" : out;
}

std::vector<TracebackMove> parse_cigar(std::string_view cigar) {
  std::vector<TracebackMove> moves;
  if (cigar != "*") {
    std::size_t pos = 0;
    while (pos < cigar.size()) {
      std::size_t digits = pos;
      while (digits < cigar.size() && std::isdigit(static_cast<unsigned char>(cigar[digits]))) ++digits;
      if (digits == pos || digits == cigar.size())
        throw Error(ErrorCode::MalformedSample, "bad move string '" + std::string(cigar) + "'");
      std::size_t run = 0;
      std::from_chars(cigar.data() + pos, cigar.data() + digits, run);
      TracebackMove m;
      switch (cigar[digits]) {
        case 'M': m = TracebackMove::MMI; break;
        case 'I': m = TracebackMove::INS; break;
        case 'D': m = TracebackMove::DEL; break;
        default: throw Error(ErrorCode::MalformedSample, "bad move letter in '" + std::string(cigar) + "'");
      }
      moves.insert(moves.end(), run, m);
      pos = digits + 1;
    }
  }
  moves.push_back(TracebackMove::END);
  return moves;
}

}  // namespace dphls
