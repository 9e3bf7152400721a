#include "dphls/kernel_spec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace dphls {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "OK";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::NonIntegralParam: return "NonIntegralParam";
    case ErrorCode::InconsistentLayers: return "InconsistentLayers";
    case ErrorCode::PointerWidthTooSmall: return "PointerWidthTooSmall";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::SymbolKindMismatch: return "SymbolKindMismatch";
    case ErrorCode::InvalidCharacter: return "InvalidCharacter";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::ProfileLengthMismatch: return "ProfileLengthMismatch";
    case ErrorCode::MalformedFasta: return "MalformedFasta";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MatrixShapeMismatch: return "MatrixShapeMismatch";
    case ErrorCode::UnknownResidue: return "UnknownResidue";
    case ErrorCode::MalformedSample: return "MalformedSample";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::TracebackOutOfBounds: return "TracebackOutOfBounds";
    case ErrorCode::NonTerminating: return "NonTerminating";
    case ErrorCode::OracleSizeExceeded: return "OracleSizeExceeded";
    case ErrorCode::EnumerationSizeExceeded: return "EnumerationSizeExceeded";
    case ErrorCode::TraceSizeExceeded: return "TraceSizeExceeded";
    case ErrorCode::TilingStalled: return "TilingStalled";
    case ErrorCode::UnknownKernel: return "UnknownKernel";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- symbols

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Nucleotide: return "Nucleotide";
    case SymbolKind::AmbiguousNucleotide: return "AmbiguousNucleotide";
    case SymbolKind::AminoAcid: return "AminoAcid";
    case SymbolKind::ProfileColumn: return "ProfileColumn";
    case SymbolKind::ComplexSample: return "ComplexSample";
    case SymbolKind::IntSample: return "IntSample";
  }
  return "?";
}

SymbolKind kind_of(const Symbol& s) { return static_cast<SymbolKind>(s.index()); }

namespace {

int nucleotide_code(char c) {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T':
    case 'U': return 3;
    default: return -1;
  }
}

}  // namespace

Sequence encode_sequence(std::string_view text, SymbolKind kind) {
  if (text.empty()) throw Error(ErrorCode::EmptySequence, "sequence is empty");
  Sequence out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size(); ++pos) {
    const char raw = text[pos];
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
    int code = -1;
    switch (kind) {
      case SymbolKind::Nucleotide:
        code = nucleotide_code(c);
        if (code >= 0) out.emplace_back(Nucleotide{static_cast<std::uint8_t>(code)});
        break;
      case SymbolKind::AmbiguousNucleotide:
        code = (c == 'N' || c == '-') ? 4 : nucleotide_code(c);
        if (code >= 0) out.emplace_back(AmbiguousNucleotide{static_cast<std::uint8_t>(code)});
        break;
      case SymbolKind::AminoAcid: {
        const auto at = kAminoAcids.find(c);
        if (at != std::string_view::npos) {
          code = static_cast<int>(at);
          out.emplace_back(AminoAcid{static_cast<std::uint8_t>(code)});
        }
        break;
      }
      default:
        throw Error(ErrorCode::SymbolKindMismatch,
                    std::string("cannot encode text as ") + std::string(to_string(kind)));
    }
    if (code < 0) {
      std::ostringstream msg;
      msg << "position " << pos << ", byte '" << raw << "'";
      throw Error(ErrorCode::InvalidCharacter, msg.str());
    }
  }
  return out;
}

std::string decode_sequence(SequenceView seq) {
  std::string out;
  out.reserve(seq.size());
  for (const auto& s : seq) {
    if (const auto* n = std::get_if<Nucleotide>(&s)) {
      out.push_back(kNucleotides[n->code]);
    } else if (const auto* a = std::get_if<AmbiguousNucleotide>(&s)) {
      out.push_back(a->code == 4 ? 'N' : kNucleotides[a->code]);
    } else if (const auto* p = std::get_if<AminoAcid>(&s)) {
      out.push_back(kAminoAcids[p->code]);
    } else {
      throw Error(ErrorCode::SymbolKindMismatch, "only letter sequences can be decoded");
    }
  }
  return out;
}

ProfileColumn normalized(const ProfileColumn& col) {
  const double sum = col.freq.sum();
  if (sum <= 0.0) return col;
  return ProfileColumn{col.freq / sum};
}

// ---------------------------------------------------------------- params

std::string_view to_string(ParamName name) {
  switch (name) {
    case ParamName::Match: return "match";
    case ParamName::Mismatch: return "mismatch";
    case ParamName::LinearGap: return "linear_gap";
    case ParamName::GapOpen: return "gap_open";
    case ParamName::GapExtend: return "gap_extend";
    case ParamName::GapOpen2: return "gap_open2";
    case ParamName::GapExtend2: return "gap_extend2";
    case ParamName::LogMu: return "log_mu";
    case ParamName::LogLambda: return "log_lambda";
    case ParamName::SubstitutionMatrix: return "substitution_matrix";
    case ParamName::Emission: return "emission";
    case ParamName::DistanceMetric: return "distance_metric";
  }
  return "?";
}

std::optional<ParamName> param_from_string(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(ParamName::DistanceMetric); ++k) {
    const auto p = static_cast<ParamName>(k);
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string_view to_string(DistanceMetric m) {
  switch (m) {
    case DistanceMetric::Manhattan: return "manhattan";
    case DistanceMetric::Euclidean: return "euclidean";
    case DistanceMetric::AbsDiff: return "absdiff";
  }
  return "?";
}

std::optional<DistanceMetric> metric_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto m : {DistanceMetric::Manhattan, DistanceMetric::Euclidean, DistanceMetric::AbsDiff})
    if (to_string(m) == lower) return m;
  return std::nullopt;
}

const std::optional<double>* ScoringParams::scalar(ParamName name) const {
  return const_cast<ScoringParams*>(this)->scalar(name);
}

std::optional<double>* ScoringParams::scalar(ParamName name) {
  switch (name) {
    case ParamName::Match: return &match;
    case ParamName::Mismatch: return &mismatch;
    case ParamName::LinearGap: return &linear_gap;
    case ParamName::GapOpen: return &gap_open;
    case ParamName::GapExtend: return &gap_extend;
    case ParamName::GapOpen2: return &gap_open2;
    case ParamName::GapExtend2: return &gap_extend2;
    case ParamName::LogMu: return &log_mu;
    case ParamName::LogLambda: return &log_lambda;
    default: return nullptr;
  }
}

bool ScoringParams::has(ParamName name) const {
  switch (name) {
    case ParamName::SubstitutionMatrix: return substitution_matrix.has_value();
    case ParamName::Emission: return emission.has_value();
    case ParamName::DistanceMetric: return distance_metric.has_value();
    default: return scalar(name)->has_value();
  }
}

// ---------------------------------------------------------------- spec

std::string_view to_string(TracebackState s) {
  switch (s) {
    case TracebackState::MM: return "MM";
    case TracebackState::INS: return "INS";
    case TracebackState::DEL: return "DEL";
    case TracebackState::LONG_INS: return "LONG_INS";
    case TracebackState::LONG_DEL: return "LONG_DEL";
  }
  return "?";
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Global: return "global";
    case Strategy::Local: return "local";
    case Strategy::SemiGlobal: return "semi-global";
    case Strategy::Overlap: return "overlap";
    case Strategy::None: return "none";
  }
  return "?";
}

StartRegion start_region_for(Strategy s) {
  switch (s) {
    case Strategy::Local: return StartRegion::Anywhere;
    case Strategy::SemiGlobal: return StartRegion::LastRow;
    case Strategy::Overlap: return StartRegion::LastRowOrColumn;
    default: return StartRegion::Corner;
  }
}

const std::string& kernel_name(const AnyKernel& k) {
  return std::visit([](const auto& s) -> const std::string& { return s.name; }, k);
}

int kernel_id(const AnyKernel& k) {
  return std::visit([](const auto& s) { return s.id; }, k);
}

SymbolKind kernel_symbol_kind(const AnyKernel& k) {
  return std::visit([](const auto& s) { return s.symbol_kind; }, k);
}

int min_pointer_width(int n_layers) {
  switch (n_layers) {
    case 1: return 2;  // DIAG/UP/LEFT/END
    case 3: return 4;  // 2-bit H source + open/extend bit per gap layer
    case 5: return 7;  // 3-bit H source + four open/extend bits
    default: return kMaxPointerWidth + 1;
  }
}

std::vector<TracebackState> canonical_states(int n_layers) {
  using S = TracebackState;
  switch (n_layers) {
    case 1: return {S::MM};
    case 3: return {S::MM, S::INS, S::DEL};
    case 5: return {S::MM, S::INS, S::DEL, S::LONG_INS, S::LONG_DEL};
    default: return {};
  }
}

std::vector<Violation> validate_config(const EngineConfig& c) {
  std::vector<Violation> out;
  auto bad = [&](const std::string& what) { out.push_back({ErrorCode::InvalidConfig, what}); };
  if (c.n_pe < 1) bad("n_pe must be positive");
  if (c.n_b < 1) bad("n_b must be positive");
  if (c.n_k < 1) bad("n_k must be positive");
  if (c.ii < 1) bad("ii must be positive");
  if (c.max_reference_length < 1) bad("max_reference_length must be >= 1");
  if (c.max_query_length < 1) bad("max_query_length must be >= 1");
  if (c.band_width) {
    if (*c.band_width < 1) bad("band_width must be positive");
    if (*c.band_width > std::max(c.max_reference_length, c.max_query_length))
      bad("band_width exceeds max(max_reference_length, max_query_length)");
  }
  if (!(c.clock_mhz > 0.0)) bad("clock_mhz must be positive");
  if (c.pipeline_depth < 0) bad("pipeline_depth must be non-negative");
  if (c.fixed_overhead_cycles < 0) bad("fixed_overhead_cycles must be non-negative");
  return out;
}

template <class Scalar>
std::vector<Violation> validate_spec(const KernelSpec<Scalar>& spec, const ScoringParams& params,
                                     const EngineConfig& config) {
  std::vector<Violation> out;

  if (spec.n_layers != 1 && spec.n_layers != 3 && spec.n_layers != 5) {
    out.push_back({ErrorCode::InconsistentLayers, "n_layers must be 1, 3 or 5"});
  } else if (spec.state_set != canonical_states(spec.n_layers)) {
    std::ostringstream msg;
    msg << "n_layers=" << spec.n_layers << " but state_set has " << spec.state_set.size() << " states";
    out.push_back({ErrorCode::InconsistentLayers, msg.str()});
  }

  if (spec.has_traceback()) {
    if (spec.pointer_width > kMaxPointerWidth || spec.pointer_width < min_pointer_width(spec.n_layers)) {
      std::ostringstream msg;
      msg << "pointer_width=" << spec.pointer_width << ", need " << min_pointer_width(spec.n_layers) << ".."
          << kMaxPointerWidth;
      out.push_back({ErrorCode::PointerWidthTooSmall, msg.str()});
    }
    if (!spec.tb_transition) out.push_back({ErrorCode::InconsistentLayers, "traceback kernel lacks tb_transition"});
    if (spec.start_region != start_region_for(spec.policy.strategy))
      out.push_back({ErrorCode::InconsistentLayers, "start_region disagrees with traceback strategy"});
  }
  if (!spec.init || !spec.pe_func) out.push_back({ErrorCode::InconsistentLayers, "kernel lacks init or pe_func"});

  for (ParamName p : spec.required_params) {
    if (!params.has(p)) {
      out.push_back({ErrorCode::MissingParam, std::string(to_string(p))});
      continue;
    }
    if constexpr (ScoreTraits<Scalar>::is_integral) {
      if (const auto* v = params.scalar(p); v && std::trunc(**v) != **v)
        out.push_back({ErrorCode::NonIntegralParam, std::string(to_string(p))});
    }
  }
  if (params.substitution_matrix) {
    const auto& m = *params.substitution_matrix;
    const auto k = m.rows();
    if (m.rows() != m.cols() || (k != 4 && k != 5 && k != 20))
      out.push_back({ErrorCode::MatrixShapeMismatch, "substitution_matrix must be K x K with K in {4, 5, 20}"});
    else if (spec.substitution_size != 0 && k != spec.substitution_size)
      out.push_back({ErrorCode::MatrixShapeMismatch, "kernel needs a " + std::to_string(spec.substitution_size) +
                                                         "x" + std::to_string(spec.substitution_size) + " matrix"});
  }

  auto cfg = validate_config(config);
  out.insert(out.end(), cfg.begin(), cfg.end());
  return out;
}

template <class Scalar>
void require_valid(const KernelSpec<Scalar>& spec, const ScoringParams& params, const EngineConfig& config) {
  const auto v = validate_spec(spec, params, config);
  if (!v.empty()) throw Error(v.front().code, v.front().detail);
}

template std::vector<Violation> validate_spec(const KernelSpec<Sat32>&, const ScoringParams&, const EngineConfig&);
template std::vector<Violation> validate_spec(const KernelSpec<double>&, const ScoringParams&, const EngineConfig&);
template void require_valid(const KernelSpec<Sat32>&, const ScoringParams&, const EngineConfig&);
template void require_valid(const KernelSpec<double>&, const ScoringParams&, const EngineConfig&);

}  // namespace dphls
