#pragma once

#include <stdexcept>
#include <string>

namespace msrforge {

// Failure classes surfaced by the library. The CLI prints the class name
// followed by a one-line message.
enum class errc {
  unsupported_order,
  reducible_modulus,
  divide_by_zero,
  dimension_mismatch,
  field_mismatch,
  inconsistent,
  underdetermined,
  singular_matrix,
  index_out_of_range,
  missing_repair_matrices,
  search_exhausted,
  parse_error,
  value_out_of_field,
  not_a_bijection,
  invalid_a,
  binary_field,
  asymmetric_perms_with_per_helper_repair,
  unverified_base,
  theta_singular,
  rank_deficient,
  singular_selection,
  wrong_count,
  contract_breach,
  singular_system,
  already_failed,
  not_failed,
  too_many_failures,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::unsupported_order: return "UnsupportedOrder";
    case errc::reducible_modulus: return "ReducibleModulus";
    case errc::divide_by_zero: return "DivideByZero";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::field_mismatch: return "FieldMismatch";
    case errc::inconsistent: return "Inconsistent";
    case errc::underdetermined: return "Underdetermined";
    case errc::singular_matrix: return "SingularMatrix";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::missing_repair_matrices: return "MissingRepairMatrices";
    case errc::search_exhausted: return "SearchExhausted";
    case errc::parse_error: return "ParseError";
    case errc::value_out_of_field: return "ValueOutOfField";
    case errc::not_a_bijection: return "NotABijection";
    case errc::invalid_a: return "InvalidA";
    case errc::binary_field: return "BinaryField";
    case errc::asymmetric_perms_with_per_helper_repair:
      return "AsymmetricPermsWithPerHelperRepair";
    case errc::unverified_base: return "UnverifiedBase";
    case errc::theta_singular: return "ThetaSingular";
    case errc::rank_deficient: return "RankDeficient";
    case errc::singular_selection: return "SingularSelection";
    case errc::wrong_count: return "WrongCount";
    case errc::contract_breach: return "ContractBreach";
    case errc::singular_system: return "SingularSystem";
    case errc::already_failed: return "AlreadyFailed";
    case errc::not_failed: return "NotFailed";
    case errc::too_many_failures: return "TooManyFailures";
    case errc::io_error: return "IoError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) {
  throw error(c, what);
}

}  // namespace msrforge
