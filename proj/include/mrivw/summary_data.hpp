#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrivw {

/// Summarized associations of one genetic variant with the risk factor (x)
/// and with the outcome (y), per effect allele.
struct VariantAssociation {
  std::string id;
  std::string gene_region;    // metadata only
  std::string effect_allele;  // metadata only, never harmonized
  std::string other_allele;
  double beta_x = 0.0;
  double se_x = 0.0;
  double beta_y = 0.0;
  double se_y = 0.0;
};

/// Throws input_error unless every numeric field is finite and both
/// standard errors are strictly positive.
void validate(const VariantAssociation& v);

/// An ordered, validated collection of variants with unique ids. Variants
/// are assumed to be mutually independent (no linkage disequilibrium); that
/// assumption is not checked.
class SummaryDataset {
 public:
  SummaryDataset() = default;
  SummaryDataset(std::vector<VariantAssociation> variants, std::string label);

  const std::vector<VariantAssociation>& variants() const { return variants_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return variants_.size(); }
  bool empty() const { return variants_.empty(); }

  const VariantAssociation& operator[](std::size_t i) const { return variants_[i]; }
  auto begin() const { return variants_.begin(); }
  auto end() const { return variants_.end(); }

  std::optional<std::size_t> find(std::string_view id) const;

  /// Copy of this dataset without the named variant; throws input_error if
  /// the id is absent.
  SummaryDataset without(std::string_view id) const;

 private:
  std::vector<VariantAssociation> variants_;
  std::string label_;
};

/// Parses CSV text. Required columns: id, beta_x, se_x, beta_y, se_y.
/// Optional: gene_region, effect_allele, other_allele. Any other column is
/// ignored and reported through `warnings` when given. Row numbers in error
/// messages are 1-based file line numbers.
SummaryDataset parse_dataset_csv(std::string_view text, std::string label,
                                 std::vector<std::string>* warnings = nullptr);

SummaryDataset load_dataset(const std::filesystem::path& path,
                            std::vector<std::string>* warnings = nullptr);

/// Writes the dataset in the same CSV layout load_dataset reads. Numbers use
/// the shortest representation that round-trips exactly.
void write_dataset_csv(std::ostream& out, const SummaryDataset& dataset);

/// 47 variants associated with early menopause, with their associations
/// with triglycerides (years earlier menopause / SD triglycerides).
const SummaryDataset& bundled_menopause_dataset();

}  // namespace mrivw
