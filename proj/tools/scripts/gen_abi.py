#!/usr/bin/env python3
"""Writes data/abi/<adapter>.json for the marketplace functions the decoder reads."""
import json
import pathlib
import sys

OFFER = ["itemType", "token", "identifierOrCriteria", "startAmount", "endAmount"]
CONSIDERATION = OFFER + ["recipient"]
ORDER_PARAMS = ["offerer", "zone", "offer", "consideration", "orderType", "startTime", "endTime",
                "zoneHash", "salt", "conduitKey", "totalOriginalConsiderationItems"]
ADV_ORDER = ["parameters", "numerator", "denominator", "signature", "extraData"]
CRITERIA = ["orderIndex", "side", "index", "identifier", "criteriaProof"]
BLUR_ORDER = ["trader", "side", "matchingPolicy", "collection", "tokenId", "amount", "paymentToken", "price",
              "listingTime", "expirationTime", "fees", "salt", "extraParams"]
BLUR_INPUT = ["order", "v", "r", "s", "extraSignature", "signatureVersion", "blockNumber"]
FEE = ["rate", "recipient"]
ITEM = ["itemType", "token", "identifier", "amount"]
TRANSFER = ["items", "recipient", "validateERC721Receiver"]

def tup(kind, names, types, sub=None):
    return {"kind": kind, "names": names, "types": types, "sub": sub or {}}

def param(name, t):
    if isinstance(t, str):
        return {"name": name, "type": t}
    out = {"name": name, "type": t["kind"], "components": []}
    for n, ty in zip(t["names"], t["types"]):
        out["components"].append(param(n, t["sub"].get(n, ty)))
    return out

item = lambda names, types: tup("tuple[]", names, types)
offer = item(OFFER, ["uint8", "address", "uint256", "uint256", "uint256"])
consideration = item(CONSIDERATION, ["uint8", "address", "uint256", "uint256", "uint256", "address"])
order_params = tup("tuple", ORDER_PARAMS, ["address", "address", None, None, "uint8", "uint256", "uint256", "bytes32",
                                           "uint256", "bytes32", "uint256"], {"offer": offer, "consideration": consideration})
adv_order = tup("tuple", ADV_ORDER, [None, "uint120", "uint120", "bytes", "bytes"], {"parameters": order_params})
order = tup("tuple", ["parameters", "signature"], [None, "bytes"], {"parameters": order_params})
criteria = tup("tuple[]", CRITERIA, ["uint256", "uint8", "uint256", "uint256", "bytes32[]"])
fees = tup("tuple[]", FEE, ["uint16", "address"])
blur_order = tup("tuple", BLUR_ORDER, ["address", "uint8", "address", "address", "uint256", "uint256", "address",
                                       "uint256", "uint256", "uint256", None, "uint256", "bytes"], {"fees": fees})
blur_input = tup("tuple", BLUR_INPUT, [None, "uint8", "bytes32", "bytes32", "bytes", "uint8", "uint256"],
                 {"order": blur_order})
transfers = tup("tuple[]", TRANSFER, [None, "address", "bool"], {"items": tup("tuple[]", ITEM, ["uint8", "address", "uint256", "uint256"])})

def fn(name, inputs):
    return {"type": "function", "name": name, "stateMutability": "payable",
            "inputs": [param(n, t) for n, t in inputs], "outputs": []}

SEAPORT = [
    fn("fulfillAdvancedOrder", [("advancedOrder", adv_order), ("criteriaResolvers", criteria),
                                ("fulfillerConduitKey", "bytes32"), ("recipient", "address")]),
    fn("fulfillOrder", [("order", order), ("fulfillerConduitKey", "bytes32")]),
]
BLUR = [fn("execute", [("sell", blur_input), ("buy", blur_input)])]
DOCS = {
    "seaport11": SEAPORT, "seaport12": SEAPORT, "seaport13": SEAPORT, "seaport14": SEAPORT,
    "blur1": BLUR, "blur2": BLUR,
    "openseaHelper": [fn("bulkTransfer", [("transfers", transfers), ("conduitKey", "bytes32")])],
    "openseaFactory": [fn("upgradeTo", [("implementation", "address")])],
}

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/abi")
out.mkdir(parents=True, exist_ok=True)
for adapter, doc in DOCS.items():
    (out / f"{adapter}.json").write_text(json.dumps(doc, indent=2) + "\n")
