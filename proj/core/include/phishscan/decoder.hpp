#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phishscan/abi.hpp"
#include "phishscan/diagnostics.hpp"
#include "phishscan/model.hpp"
#include "phishscan/reference.hpp"

namespace phishscan {

/// First four bytes of calldata; absent when shorter.
std::optional<Selector> selector_of(ByteView input);

SelectorClass classify_selector(const Selector& sel, const LabelRegistry& registry);

struct NftItem {
  Address collection;
  U256 token_id = 0;
  friend bool operator==(const NftItem&, const NftItem&) = default;
};

/// A marketplace sale order as the seller (offerer) signed it.
struct OrderInfo {
  std::string market;  // adapter id
  Address offerer;
  Address recipient;   // largest payee of the proceeds; the offerer on a normal sale
  Address buyer;       // receiver of the NFTs
  U256 price_wei = 0;  // nominal total price in the payment currency
  std::uint32_t fees_bps = 0;
  std::optional<Address> payment_token;  // absent = native
  std::vector<NftItem> nft_items;

  friend bool operator==(const OrderInfo&, const OrderInfo&) = default;
};

using MarketCall = std::variant<OrderInfo, DecodedCall>;

using ProxyOwnerLookup = std::function<std::optional<Address>(const Address& proxy)>;

/// Selector-driven calldata decoders for token standards and the supported marketplaces.
/// Stateless after construction; safe for concurrent use.
class Decoder {
public:
  /// Uses the built-in ABIs for every adapter.
  Decoder();
  /// Reads <dir>/<adapter-id>.json where present; each must contain the adapter's functions
  /// with the expected argument layout (ConfigError otherwise).
  static Decoder load(const std::filesystem::path& abi_dir);

  /// approve, increaseAllowance, transfer, transferFrom, permit (ERC-2612, DAI-style, permit2),
  /// permit2 approve, setApprovalForAll. Absent for anything else or malformed arguments.
  [[nodiscard]] std::optional<DecodedCall> decode_token_call(const Transaction& tx, const LabelRegistry& registry,
                                                             Diagnostics* diag = nullptr) const;

  /// Order execution on a market contract yields OrderInfo; bulkTransfer and upgradeTo yield a DecodedCall.
  [[nodiscard]] std::optional<MarketCall> decode_market_order(const Transaction& tx, const LabelRegistry& registry,
                                                              const ProxyOwnerLookup& proxy_owner,
                                                              Diagnostics* diag = nullptr) const;

  /// ABI of an adapter function, e.g. (Blur1, "execute").
  [[nodiscard]] const abi::Function& market_function(MarketAdapter adapter, const std::string& name) const;

  /// Built-in signature for a token-call name ("approve", "permit2.permit", ...).
  static const abi::Function& token_function(const std::string& name);

private:
  std::map<MarketAdapter, std::vector<abi::Function>> market_abis_;
};

/// Names of the functions each adapter decodes, in canonical built-in form.
const std::vector<std::string>& builtin_market_signatures(MarketAdapter adapter);

}  // namespace phishscan
