#include "mrivw/summary_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "mrivw/error.hpp"
#include "mrivw/format.hpp"

namespace mrivw {

namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::string where(std::size_t line, std::string_view column) {
  std::ostringstream os;
  os << "row " << line << ", column '" << column << "'";
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

struct BundledRow {
  const char* id;
  const char* gene;
  char effect;
  char other;
  double beta_x, se_x, beta_y, se_y;
};

// clang-format off
constexpr std::array<BundledRow, 47> kMenopauseRows{{
    {"rs10734411", "EIF3M", 'G', 'A', 0.12, 0.02, 0.0017, 0.0047},
    {"rs10852344", "GSPT1/BCAR4", 'T', 'C', 0.16, 0.02, -0.0030, 0.0047},
    {"rs10905065", "FBXO18", 'A', 'G', 0.11, 0.02, -0.0056, 0.0047},
    {"rs10957156", "CHD7", 'G', 'A', 0.14, 0.02, 0.0114, 0.0056},
    {"rs11031006", "FSHB", 'G', 'A', 0.25, 0.03, -0.0186, 0.0068},
    {"rs11668344", "BRSK1/NLRP11/U2AF2", 'A', 'G', 0.41, 0.02, 0.0009, 0.0049},
    {"rs11738223", "SH3PXD2B", 'G', 'A', 0.12, 0.02, 0.0007, 0.0036},
    {"rs1183272", "HELB", 'T', 'C', 0.31, 0.03, 0.0005, 0.0047},
    {"rs12142240", "RAD54L", 'C', 'T', 0.13, 0.02, 0.0051, 0.0050},
    {"rs12196873", "REV3L", 'A', 'C', 0.16, 0.03, -0.0099, 0.0068},
    {"rs12461110", "BRSK1/NLRP11/U2AF2", 'G', 'A', 0.15, 0.02, 0.0061, 0.0051},
    {"rs12824058", "PIWIL1", 'A', 'G', 0.14, 0.02, 0.0006, 0.0048},
    {"rs13040088", "SLCO4A1/DIDO1", 'A', 'G', 0.16, 0.02, 0.0004, 0.0057},
    {"rs1411478", "STX6", 'A', 'G', 0.13, 0.02, -0.0004, 0.0047},
    {"rs16858210", "PARL/POLR2H", 'A', 'G', 0.14, 0.02, 0.0023, 0.0055},
    {"rs16991615", "MCM8", 'A', 'G', 0.88, 0.04, 0.0025, 0.0073},
    {"rs1713460", "APEX1/PARP2/PNP", 'A', 'G', 0.14, 0.02, 0.0015, 0.0056},
    {"rs1799949", "BRCA1", 'A', 'G', 0.14, 0.02, 0.0107, 0.0049},
    {"rs1800932", "MSH6", 'G', 'A', 0.17, 0.03, 0.0020, 0.0060},
    {"rs2230365", "MSH5/HLA", 'T', 'C', 0.16, 0.03, 0.0202, 0.0046},
    {"rs2236553", "SLCO4A1/DIDO1", 'C', 'T', 0.16, 0.03, -0.0021, 0.0065},
    {"rs2241584", "UIMC1", 'A', 'G', 0.14, 0.02, -0.0007, 0.0048},
    {"rs2277339", "PRIM1/TAC3", 'G', 'T', 0.31, 0.03, -0.0072, 0.0080},
    {"rs2720044", "STAR", 'C', 'A', 0.29, 0.03, 0.0043, 0.0078},
    {"rs2941505", "STARD3/PGAP3/CDK12", 'A', 'G', 0.13, 0.02, -0.0074, 0.0035},
    {"rs349306", "POLR2E/KISS1R", 'G', 'A', 0.23, 0.04, -0.0082, 0.0055},
    {"rs365132", "UIMC1", 'G', 'T', 0.24, 0.02, -0.0003, 0.0047},
    {"rs3741604", "HELB", 'T', 'C', 0.29, 0.03, -0.0014, 0.0047},
    {"rs4246511", "RHBDL2/MYCBP", 'T', 'C', 0.22, 0.02, 0.0093, 0.0056},
    {"rs427394", "PAPD7", 'G', 'A', 0.13, 0.02, -0.0013, 0.0048},
    {"rs451417", "MCM8", 'C', 'A', 0.20, 0.03, 0.0019, 0.0081},
    {"rs4693089", "HELQ/FAM175A", 'G', 'A', 0.20, 0.02, 0.0045, 0.0048},
    {"rs4879656", "APTX", 'C', 'A', 0.12, 0.02, 0.0033, 0.0049},
    {"rs4886238", "TDRD3", 'A', 'G', 0.18, 0.02, 0.0009, 0.0050},
    {"rs551087", "SPPL3/SRSF9", 'A', 'G', 0.13, 0.02, 0.0032, 0.0036},
    {"rs5762534", "CHEK2", 'C', 'T', 0.16, 0.03, 0.0056, 0.0066},
    {"rs6484478", "FSHB", 'G', 'A', 0.14, 0.02, -0.0102, 0.0053},
    {"rs6856693", "ASCL1/MLF1IP", 'A', 'G', 0.16, 0.02, -0.0044, 0.0048},
    {"rs6899676", "SYCP2L/MAK", 'G', 'A', 0.21, 0.03, 0.0045, 0.0058},
    {"rs704795", "BRE/GTF3C2/EIFB4", 'G', 'A', 0.16, 0.02, 0.0567, 0.0034},
    {"rs707938", "MSH5/HLA", 'A', 'G', 0.16, 0.02, 0.0014, 0.0049},
    {"rs7259376", "ZNF729", 'A', 'G', 0.11, 0.02, -0.0041, 0.0047},
    {"rs763121", "DMC1/DDX17", 'G', 'A', 0.16, 0.02, -0.0179, 0.0036},
    {"rs8070740", "RPAIN", 'G', 'A', 0.15, 0.02, 0.0121, 0.0056},
    {"rs9039", "C16orf72/ABAT", 'C', 'T', 0.12, 0.02, -0.0068, 0.0037},
    {"rs930036", "TLK1/GAD1", 'A', 'G', 0.19, 0.02, -0.0001, 0.0049},
    {"rs9393800", "SYCP2L/MAK", 'A', 'G', 0.14, 0.02, 0.0073, 0.0054},
}};
// clang-format on

}  // namespace

void validate(const VariantAssociation& v) {
  const std::array<std::pair<const char*, double>, 4> fields{{
      {"beta_x", v.beta_x}, {"se_x", v.se_x}, {"beta_y", v.beta_y}, {"se_y", v.se_y}}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value)) {
      throw input_error("variant '" + v.id + "': non-finite value in " + name);
    }
  }
  if (!(v.se_x > 0.0)) throw input_error("variant '" + v.id + "': non-positive standard error se_x");
  if (!(v.se_y > 0.0)) throw input_error("variant '" + v.id + "': non-positive standard error se_y");
}

SummaryDataset::SummaryDataset(std::vector<VariantAssociation> variants, std::string label)
    : variants_(std::move(variants)), label_(std::move(label)) {
  std::unordered_set<std::string> seen;
  for (const auto& v : variants_) {
    validate(v);
    if (!seen.insert(v.id).second) throw input_error("duplicate id '" + v.id + "'");
  }
}

std::optional<std::size_t> SummaryDataset::find(std::string_view id) const {
  auto it = std::find_if(variants_.begin(), variants_.end(),
                         [&](const VariantAssociation& v) { return v.id == id; });
  if (it == variants_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - variants_.begin());
}

SummaryDataset SummaryDataset::without(std::string_view id) const {
  auto idx = find(id);
  if (!idx) throw input_error("unknown variant id '" + std::string(id) + "'");
  std::vector<VariantAssociation> kept;
  kept.reserve(variants_.size() - 1);
  for (std::size_t i = 0; i < variants_.size(); ++i) {
    if (i != *idx) kept.push_back(variants_[i]);
  }
  return SummaryDataset(std::move(kept), label_ + " without " + std::string(id));
}

SummaryDataset parse_dataset_csv(std::string_view text, std::string label,
                                 std::vector<std::string>* warnings) {
  static const std::array<std::string_view, 8> known{
      "id", "gene_region", "effect_allele", "other_allele", "beta_x", "se_x", "beta_y", "se_y"};
  static const std::array<std::string_view, 5> required{"id", "beta_x", "se_x", "beta_y", "se_y"};

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  // header: skip leading blank lines and a UTF-8 BOM
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) {
      header = split_record(line);
      break;
    }
  }
  if (header.empty()) throw input_error("empty dataset: no header row");

  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(known.begin(), known.end(), header[i]) == known.end()) {
      if (warnings) warnings->push_back("ignoring unrecognized column '" + header[i] + "'");
      continue;
    }
    if (!column.emplace(header[i], i).second) {
      throw input_error("duplicate column '" + header[i] + "' in header");
    }
  }
  for (auto name : required) {
    if (!column.count(name)) throw input_error("missing required column '" + std::string(name) + "'");
  }

  std::vector<VariantAssociation> variants;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "row " << line_no << ": expected " << header.size() << " fields, found " << fields.size();
      throw input_error(os.str());
    }
    auto text_field = [&](std::string_view name) -> std::string {
      auto it = column.find(name);
      return it == column.end() ? std::string{} : fields[it->second];
    };
    auto number = [&](std::string_view name) {
      double value = 0.0;
      if (!fmt::parse_double(fields[column.find(name)->second], value)) {
        throw input_error(where(line_no, name) + ": not a number");
      }
      if (!std::isfinite(value)) throw input_error(where(line_no, name) + ": non-finite value");
      return value;
    };

    VariantAssociation v;
    v.id = text_field("id");
    if (v.id.empty()) throw input_error(where(line_no, "id") + ": empty id");
    v.gene_region = text_field("gene_region");
    v.effect_allele = text_field("effect_allele");
    v.other_allele = text_field("other_allele");
    v.beta_x = number("beta_x");
    v.se_x = number("se_x");
    v.beta_y = number("beta_y");
    v.se_y = number("se_y");
    if (!(v.se_x > 0.0)) throw input_error(where(line_no, "se_x") + ": non-positive standard error");
    if (!(v.se_y > 0.0)) throw input_error(where(line_no, "se_y") + ": non-positive standard error");
    if (!seen.insert(v.id).second) {
      throw input_error(where(line_no, "id") + ": duplicate id '" + v.id + "'");
    }
    variants.push_back(std::move(v));
  }
  if (variants.empty()) throw input_error("empty dataset: header row but no variants");
  return SummaryDataset(std::move(variants), std::move(label));
}

SummaryDataset load_dataset(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset_csv(buf.str(), path.stem().string(), warnings);
  } catch (const input_error& e) {
    throw input_error(path.string() + ": " + e.what());
  }
}

void write_dataset_csv(std::ostream& out, const SummaryDataset& dataset) {
  out << "id,gene_region,effect_allele,other_allele,beta_x,se_x,beta_y,se_y\n";
  for (const auto& v : dataset) {
    out << csv_field(v.id) << ',' << csv_field(v.gene_region) << ',' << csv_field(v.effect_allele)
        << ',' << csv_field(v.other_allele) << ','
        << fmt::shortest(v.beta_x) << ',' << fmt::shortest(v.se_x) << ','
        << fmt::shortest(v.beta_y) << ',' << fmt::shortest(v.se_y) << '\n';
  }
}

const SummaryDataset& bundled_menopause_dataset() {
  static const SummaryDataset dataset = [] {
    std::vector<VariantAssociation> variants;
    variants.reserve(kMenopauseRows.size());
    for (const auto& r : kMenopauseRows) {
      variants.push_back({r.id, r.gene, std::string(1, r.effect), std::string(1, r.other),
                          r.beta_x, r.se_x, r.beta_y, r.se_y});
    }
    return SummaryDataset(std::move(variants), "menopause_triglycerides");
  }();
  return dataset;
}

}  // namespace mrivw
