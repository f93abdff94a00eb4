#include "phishscan/app/flagship.hpp"

#include "phishscan/app/fixture_builder.hpp"
#include "phishscan/decoder.hpp"
#include "phishscan/keccak.hpp"

namespace phishscan::app {

using abi::make_address;
using abi::make_bytes;
using abi::make_list;
using abi::make_uint;

namespace {

U256 pow10(unsigned n) {
  U256 v = 1;
  for (unsigned i = 0; i < n; ++i) v *= 10;
  return v;
}

Address named(std::string_view label) {
  const Hash32 h = keccak256(label);
  return Address::from_span(ByteView(h.bytes()).subspan(12, 20));
}

Transaction tx(const Hash32& hash, const Address& from, const Address& to, Bytes input, std::vector<Log> logs,
               const U256& value = 0) {
  Transaction t;
  t.hash = hash;
  t.from = from;
  t.to = to;
  t.value_wei = value;
  t.input = std::move(input);
  t.logs = std::move(logs);
  t.gas_used = 60'000;
  t.effective_gas_price_wei = U256(30) * 1'000'000'000u;
  return t;
}

}  // namespace

FlagshipTxs write_flagship_fixtures(const std::filesystem::path& dir) {
  FixtureBuilder fb(18'000'000, 1'690'000'000);
  fb.tokens = mainnet_tokens();
  fb.selectors = scam_selectors();
  for (const auto& [sym, usd] : std::vector<std::pair<std::string, std::string>>{
           {"ETH", "2000"}, {"WETH", "2000"}, {"stETH", "2000"}, {"WBTC", "30000"},
           {"USDT", "1"}, {"USDC", "1"}, {"DAI", "1"}, {"BUSD", "1"}})
    fb.prices.emplace_back(sym, fb.first_block(), usd);
  fb.permit2.push_back(default_permit2_address());

  const Address blur = normalize_address("0x000000000000Ad05Ccc4F10045630fb830B95127");
  fb.markets.emplace_back(blur, "Blur", MarketAdapter::Blur1);
  const Address collection = named("flagship:collection");  // no floor listed; valued at the order price
  const Address fake_usdt = named("flagship:fake-usdt");
  fb.symbols.emplace_back(fake_usdt, "USDT", 6);

  FlagshipTxs out;
  out.blur_victim = named("flagship:nft-owner");
  out.blur_scammer = named("flagship:nft-scammer");
  out.exchange_wallet = named("flagship:exchange-hot-wallet");
  out.genuine_address = normalize_address("0xa7B4BAC8f0f9692e56750aEFB5f6cB5516E90570");
  out.lookalike_address = normalize_address("0xa7Bf48749D2E4aA29e3209879956b9bAa9E90570");
  out.blur_free_order = keccak256(std::string_view("flagship:blur-free-order"));
  out.genuine_deposit = keccak256(std::string_view("flagship:genuine-deposit"));
  out.forged_transfer = keccak256(std::string_view("flagship:forged-transfer"));
  out.mistaken_transfer = Hash32::from_hex("0x08255ca0e42a872559437141fa46980e66d907f7668922467d67515b1ebb4b7f");
  out.benign_transfer = keccak256(std::string_view("flagship:benign"));
  fb.cex.push_back(out.exchange_wallet);

  const Address usdt = mainnet_token("USDT").address;
  const U256 ten_million = U256(10'000'000) * pow10(6);
  fb.hold(usdt, out.exchange_wallet, BigInt(ten_million * 5));
  fb.hold(std::nullopt, out.exchange_wallet, BigInt(pow10(20)));
  fb.hold(collection, out.blur_victim, 1);

  // Blur listing of 5 ETH whose fee list pays 100% to the buyer.
  const U256 token_id = 4321;
  const U256 price = U256(5) * pow10(18);
  const Decoder decoder;
  const auto& execute = decoder.market_function(MarketAdapter::Blur1, "execute");
  auto input = [&](const Address& trader, unsigned side, std::vector<abi::Value> fees) {
    const auto order = make_list({make_address(trader), make_uint(side), make_address(Address{}), make_address(collection),
                                  make_uint(token_id), make_uint(1), make_address(Address{}), make_uint(price),
                                  make_uint(1'690'000'000), make_uint(1'700'000'000), make_list(std::move(fees)),
                                  make_uint(7), make_bytes({})});
    return make_list({order, make_uint(27), make_bytes(Bytes(32, 1)), make_bytes(Bytes(32, 2)), make_bytes({}),
                      make_uint(0), make_uint(0)});
  };
  const Bytes calldata = execute.encode_call(
      {input(out.blur_victim, 1, {make_list({make_uint(10000), make_address(out.blur_scammer)})}),
       input(out.blur_scammer, 0, {})});

  auto next = [&] { return fb.add_block(); };
  std::uint64_t b = next();
  fb.add_tx(b, tx(out.genuine_deposit, out.exchange_wallet, usdt,
                  token_call("transfer", {make_address(out.genuine_address), make_uint(ten_million)}),
                  {erc20_transfer_log(usdt, out.exchange_wallet, out.genuine_address, ten_million)}));
  fb.add_tx(b, tx(out.benign_transfer, out.exchange_wallet, named("flagship:customer"), {}, {}, pow10(18)));
  b = next();
  fb.add_tx(b, tx(out.forged_transfer, named("flagship:poisoner"), fake_usdt,
                  token_call("transferFrom",
                             {make_address(out.exchange_wallet), make_address(out.lookalike_address), make_uint(ten_million)}),
                  {erc20_transfer_log(fake_usdt, out.exchange_wallet, out.lookalike_address, ten_million)}));
  b = next();
  fb.add_tx(b, tx(out.blur_free_order, out.blur_scammer, blur, calldata,
                  {erc721_transfer_log(collection, out.blur_victim, out.blur_scammer, token_id)}));
  b = next();
  fb.add_tx(b, tx(out.mistaken_transfer, out.exchange_wallet, usdt,
                  token_call("transfer", {make_address(out.lookalike_address), make_uint(ten_million * 2)}),
                  {erc20_transfer_log(usdt, out.exchange_wallet, out.lookalike_address, ten_million * 2)}));
  fb.write(dir);
  return out;
}

}  // namespace phishscan::app
