#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishscan/money.hpp"
#include "phishscan/types.hpp"

namespace phishscan {

struct Log {
  Address emitter;
  std::vector<Hash32> topics;  // at most 4
  Bytes data;

  friend bool operator==(const Log&, const Log&) = default;
};

enum class TxStatus : std::uint8_t { Success, Failure };

struct Transaction {
  Hash32 hash;
  Address from;
  std::optional<Address> to;  // absent for contract creation
  U256 value_wei = 0;
  Bytes input;
  TxStatus status = TxStatus::Success;
  std::uint64_t gas_used = 0;
  U256 effective_gas_price_wei = 0;
  std::uint64_t block_number = 0;
  std::uint32_t tx_index = 0;
  std::vector<Log> logs;

  [[nodiscard]] bool succeeded() const noexcept { return status == TxStatus::Success; }
  friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Throws ValidationError when the transaction violates its structural invariants.
void validate(const Transaction& tx);

enum class TransferKind : std::uint8_t { Native, Erc20, Erc721 };

struct TransferEvent {
  TransferKind kind = TransferKind::Native;
  std::optional<Address> token;  // absent iff native
  Address from;
  Address to;
  U256 amount = 0;  // wei, raw token units, or tokenId
  Hash32 tx_hash;
  std::uint64_t block_number = 0;
  std::optional<std::uint32_t> log_index;

  friend bool operator==(const TransferEvent&, const TransferEvent&) = default;
};

struct TransferItem {
  Address token;
  U256 token_id = 0;
  Address recipient;
  friend bool operator==(const TransferItem&, const TransferItem&) = default;
};

using ParamValue = std::variant<Address, U256, bool, std::vector<TransferItem>>;

struct DecodedCall {
  Selector selector;
  std::optional<std::string> function_name;
  std::map<std::string, ParamValue> params;

  [[nodiscard]] std::optional<Address> address_param(const std::string& name) const;
  [[nodiscard]] std::optional<U256> uint_param(const std::string& name) const;
  [[nodiscard]] std::optional<bool> bool_param(const std::string& name) const;
  [[nodiscard]] const std::vector<TransferItem>* items_param(const std::string& name) const;

  friend bool operator==(const DecodedCall&, const DecodedCall&) = default;
};

enum class Category : std::uint8_t { IcePhishing, NftOrder, AddressPoisoning, PayableFunction };

enum class SubCategory : std::uint8_t {
  Approve,
  Permit,
  SetApproveForAll,
  BulkTransfer,
  ProxyUpgrade,
  FreeBuyOrder,
  ZeroValue,
  FakeToken,
  DustValue,
  AirdropFunction,
  WalletFunction,
};

inline constexpr Category kAllCategories[] = {Category::IcePhishing, Category::NftOrder,
                                              Category::AddressPoisoning, Category::PayableFunction};
inline constexpr SubCategory kAllSubCategories[] = {
    SubCategory::Approve,      SubCategory::Permit,          SubCategory::SetApproveForAll,
    SubCategory::BulkTransfer, SubCategory::ProxyUpgrade,    SubCategory::FreeBuyOrder,
    SubCategory::ZeroValue,    SubCategory::FakeToken,       SubCategory::DustValue,
    SubCategory::AirdropFunction, SubCategory::WalletFunction};

Category category_of(SubCategory sub) noexcept;
std::string_view to_string(Category c) noexcept;
std::string_view to_string(SubCategory s) noexcept;
/// Stable rule id, "I-A" through "IV-B".
std::string_view rule_id(SubCategory s) noexcept;
Category parse_category(std::string_view text);
SubCategory parse_sub_category(std::string_view text);
SubCategory sub_category_from_rule_id(std::string_view id);

struct Evidence {
  std::string rule_id;
  std::vector<Hash32> supporting_tx_hashes;
  friend bool operator==(const Evidence&, const Evidence&) = default;
};

/// Fallback valuation of a leg in a payment currency (e.g. the accepted order price).
struct AssetQuote {
  std::optional<Address> token;  // absent = native
  U256 amount = 0;
  friend bool operator==(const AssetQuote&, const AssetQuote&) = default;
};

/// One asset movement attributed to a verdict; the basis of loss valuation.
struct AssetLeg {
  TransferKind kind = TransferKind::Native;
  std::optional<Address> token;
  Address from;
  Address to;
  U256 amount = 0;
  std::optional<AssetQuote> quote;
  friend bool operator==(const AssetLeg&, const AssetLeg&) = default;
};

AssetLeg leg_from(const TransferEvent& e);

struct Verdict {
  Hash32 tx_hash;
  std::uint64_t block_number = 0;
  std::uint64_t timestamp = 0;
  std::uint32_t tx_index = 0;
  Category category = Category::IcePhishing;
  SubCategory sub_category = SubCategory::Approve;
  std::vector<Address> scammer;
  Address victim;
  std::vector<Evidence> evidence;
  std::vector<AssetLeg> assets;
  std::map<std::string, std::string> detail;
  std::optional<Usd> loss_usd;
  bool loss_partial = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Throws ValidationError on category/sub-category mismatch or empty evidence.
void validate(const Verdict& v);

/// Canonical ordering: block, tx index, category, sub-category, victim.
bool verdict_less(const Verdict& a, const Verdict& b);

/// One JSON object, no trailing newline.
std::string encode_verdict(const Verdict& v);
Verdict decode_verdict(std::string_view json_line);

}  // namespace phishscan
