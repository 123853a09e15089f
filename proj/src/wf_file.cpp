#include "qmcnodes/wf_file.hpp"

#include <stdexcept>
#include <vector>

#include "qmcnodes/textfile.hpp"

namespace qmcnodes {

namespace {

/// `i j k c` rows for the two-electron expansions.
std::vector<TripletHylleraasTerm> triplet_terms(SectionReader& reader,
                                                const std::string& context) {
  std::vector<TripletHylleraasTerm> terms;
  for (const auto& row : reader.repeated("term")) {
    const auto numbers = parse_double_list_strict(row, context + " term");
    if (numbers.size() != 4)
      throw std::invalid_argument(context +
                                  ": term rows are 'i j k coefficient'");
    TripletHylleraasTerm term;
    term.i = static_cast<int>(numbers[0]);
    term.j = static_cast<int>(numbers[1]);
    term.k = static_cast<int>(numbers[2]);
    if (term.i != numbers[0] || term.j != numbers[1] || term.k != numbers[2])
      throw std::invalid_argument(context + ": term powers must be integers");
    term.coeff = numbers[3];
    terms.push_back(term);
  }
  if (terms.empty())
    throw std::invalid_argument(context + ": needs at least one term row");
  return terms;
}

/// `p1 p2 p3 p12 p13 p23 c` rows for the lithium doublet expansion.
std::vector<DoubletSTerm> doublet_terms(SectionReader& reader,
                                        const std::string& context) {
  std::vector<DoubletSTerm> terms;
  for (const auto& row : reader.repeated("term")) {
    const auto numbers = parse_double_list_strict(row, context + " term");
    if (numbers.size() != 7)
      throw std::invalid_argument(
          context + ": term rows are 'p1 p2 p3 p12 p13 p23 coefficient'");
    DoubletSTerm term;
    for (int s = 0; s < 6; ++s) {
      term.powers[s] = static_cast<int>(numbers[s]);
      if (term.powers[s] != numbers[s])
        throw std::invalid_argument(context + ": term powers must be integers");
    }
    term.coeff = numbers[6];
    terms.push_back(term);
  }
  if (terms.empty())
    throw std::invalid_argument(context + ": needs at least one term row");
  return terms;
}

std::shared_ptr<const WaveFunction> build_wavefunction(const TextFile& file) {
  const std::string& source = file.source;
  reject_unknown_sections(file, {"wavefunction", "parameters", "terms", "jastrow"});

  const TextSection* header = file.find("wavefunction");
  if (header == nullptr)
    throw std::invalid_argument(source + ": missing [wavefunction] section");
  SectionReader head(file, *header);
  const std::string kind = head.get_string("kind");
  head.finish();

  const TextSection* parameters = file.find("parameters");
  if (parameters == nullptr)
    throw std::invalid_argument(source + ": missing [parameters] section");
  SectionReader params(file, *parameters);

  const TextSection* term_section = file.find("terms");
  const bool hylleraas_kind = kind == "he_triplet" ||
                              kind == "he_triplet_open" ||
                              kind == "li_hylleraas";
  if (hylleraas_kind && term_section == nullptr)
    throw std::invalid_argument(source + ": kind '" + kind +
                                "' needs a [terms] section");
  if (!hylleraas_kind && term_section != nullptr)
    throw std::invalid_argument(source + ": kind '" + kind +
                                "' does not take a [terms] section");

  std::shared_ptr<const WaveFunction> wf;
  if (kind == "hydrogenic_1s") {
    wf = build_hydrogenic_1s(params.get_double("zeta"));
  } else if (kind == "li_rhf") {
    const double zeta_1s = params.get_double("zeta_1s");
    const double zeta_2s = params.get_double("zeta_2s");
    const double q = params.get_double("q");
    wf = build_li_rhf(zeta_1s, zeta_2s, q);
  } else if (kind == "be_hf") {
    const double zeta_1s = params.get_double("zeta_1s");
    const double zeta_2s = params.get_double("zeta_2s");
    const double q = params.get_double("q");
    wf = build_be_hf(zeta_1s, zeta_2s, q);
  } else if (kind == "be_two_config") {
    const double c2 = params.get_double("c2");
    const double zeta_1s = params.get_double("zeta_1s");
    const double zeta_2s = params.get_double("zeta_2s");
    const double q = params.get_double("q");
    const double zeta_2p = params.get_double("zeta_2p");
    wf = build_be_two_config(c2, zeta_1s, zeta_2s, q, zeta_2p);
  } else if (kind == "he_triplet") {
    SectionReader rows(file, *term_section);
    const auto terms = triplet_terms(rows, rows.context());
    rows.finish();
    wf = build_he_triplet_hylleraas(terms, params.get_double("alpha"));
  } else if (kind == "he_triplet_open") {
    SectionReader rows(file, *term_section);
    const auto terms = triplet_terms(rows, rows.context());
    rows.finish();
    wf = build_he_triplet_open(terms, params.get_double("alpha"),
                               params.get_double("beta"));
  } else if (kind == "li_hylleraas") {
    SectionReader rows(file, *term_section);
    const auto terms = doublet_terms(rows, rows.context());
    rows.finish();
    wf = project_doublet_s(terms, params.get_double("alpha"),
                           params.get_double("beta"));
  } else {
    throw std::invalid_argument(source + ": unknown wave-function kind '" +
                                kind + "'");
  }
  params.finish();

  if (const TextSection* jastrow_section = file.find("jastrow")) {
    SectionReader jastrow(file, *jastrow_section);
    JastrowFactor factor;
    factor.a_parallel = jastrow.get_double("a_parallel", factor.a_parallel);
    factor.b_parallel = jastrow.get_double("b_parallel", factor.b_parallel);
    factor.a_antiparallel =
        jastrow.get_double("a_antiparallel", factor.a_antiparallel);
    factor.b_antiparallel =
        jastrow.get_double("b_antiparallel", factor.b_antiparallel);
    factor.a_en = jastrow.get_double("a_en", factor.a_en);
    factor.b_en = jastrow.get_double("b_en", factor.b_en);
    jastrow.finish();
    wf = with_jastrow(wf, factor);
  }

  return wf;
}

}  // namespace

std::shared_ptr<const WaveFunction> parse_wavefunction_text(
    const std::string& text, const std::string& source) {
  return build_wavefunction(parse_sectioned_text(text, source));
}

std::shared_ptr<const WaveFunction> load_wavefunction(const std::string& path) {
  return build_wavefunction(load_sectioned_text(path));
}

}  // namespace qmcnodes
