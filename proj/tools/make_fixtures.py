#!/usr/bin/env python3
# Copyright 2026 The repodsl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the checked-in test fixtures under tests/fixtures.

Usage: tools/make_fixtures.py path/to/repodsl

Markets are small trees of .dsl files. Every fixture is written from the
definitions below; the corpus, prompts, replay archives and golden files are
produced by running the repodsl binary so they match its canonical output.
"""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "tests" / "fixtures"
REGISTRY = ROOT / "data" / "registry.json"

BASE_ATTRS = [
    ("attribute1", "AttributeType16"),
    ("attribute2", "AttributeType17"),
    ("attribute3", "AttributeType8"),
    ("attribute4", "AttributeType9"),
    ("attribute5", "AttributeType9"),
    ("attribute6", "AttributeType6"),
]

PRODUCT_TYPES = ["type_a", "type_b", "type_c", "type_d"]
CATEGORIES = ["loan", "deposit", "card", "leasing"]
REGIONS = ["north", "south", "east", "west"]


def product(name, attrs, ptype, category):
    return {"name": name, "attrs": attrs, "ptype": ptype, "category": category}


def entity(name, parent, typed, assigned=(), abstract=False):
    head = "entity " + ("abstract " if abstract else "") + name
    if parent:
        head += " extends " + parent
    lines = [head + " {"]
    lines += [f"    {n}: {t}" for n, t in typed]
    lines += [f"    {n} = {ref}" for n, ref in assigned]
    lines.append("}")
    return "\n".join(lines) + "\n"


def market_files(market, base_attrs, products, slice_extra=None):
    """Flat {path: content} map for one market."""
    files = {
        f"{market}/market.properties": f"market={market}\ncurrency=EUR\n",
        f"{market}/server/finance/FinanceProductBase.dsl": "// shared product fields\n"
        + entity("FinanceProductBase", "FinanceProduct", base_attrs, abstract=True),
    }
    for i, p in enumerate(products):
        n = p["name"]
        files[f"{market}/server/products/{n}.dsl"] = entity(
            n,
            "FinanceProductBase",
            p["attrs"],
            [
                ("productType", f"FinanceProductTypeModule::{p['ptype']}"),
                ("category", f"CategoryType::{p['category']}"),
            ],
        )
        files[f"{market}/ui/products/{n}View.dsl"] = entity(
            f"{n}View", n, [("label", "AttributeType21")]
        )
        assigned = [("region", f"RegionType::{REGIONS[i % len(REGIONS)]}")]
        typed = []
        if slice_extra and slice_extra[0] == n:
            typed = [slice_extra[1]]
        files[f"{market}/timeslices/{n}Slice.dsl"] = entity(f"{n}Slice", n, typed, assigned)
    return files


def nest(flat):
    root = {}
    for path, content in flat.items():
        node = root
        parts = path.split("/")
        for seg in parts[:-1]:
            node = node.setdefault(seg, {})
        node[parts[-1]] = content
    return root


def write_tree(flat, root):
    for path, content in flat.items():
        p = root / path
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(content.encode("utf-8"))


def standard_products(market_idx):
    names = ["ProductTypeA", "ProductTypeB", "ProductTypeC"]
    out = []
    for j, n in enumerate(names[: 2 + market_idx % 2]):
        out.append(
            product(
                n,
                [(f"attribute{7 + j}", f"AttributeType{18 + j}")],
                PRODUCT_TYPES[(market_idx + j) % 4],
                CATEGORIES[(market_idx + j) % 4],
            )
        )
    return out


MARKETS = ["alpen", "baltic", "celtic", "danube"]


def tasks():
    """(operation, index, instruction, context_flat, target_flat)."""
    out = []
    for k, m in enumerate(MARKETS, start=1):
        prods = standard_products(k - 1)
        full = market_files(m, BASE_ATTRS, prods)

        # create: from a bare market folder to a full configuration.
        ctx = {f"{m}/market.properties": full[f"{m}/market.properties"]}
        out.append(("create", k, f"Create the {m} market with products "
                    + ", ".join(p["name"] for p in prods) + ".", ctx, full))

        # add_attribute: one new typed attribute on the shared base entity.
        new_attr = ("attribute10", f"AttributeType{10 + k}")
        if k == 4:
            new_attr = ("attribute10", "AttributeType42")  # not in the registry
        tgt = market_files(m, BASE_ATTRS + [new_attr], prods)
        out.append(("add_attribute", k,
                    f"Add attribute attribute10 of type AttributeType{10 + k} to "
                    f"FinanceProductBase in the {m} market.", full, tgt))

        # add_product: a new product with server, ui and timeslice files.
        newp = product("ProductTypeD", [("attribute12", f"AttributeType{2 + k}")],
                       PRODUCT_TYPES[(k + 2) % 4], CATEGORIES[(k + 1) % 4])
        extra = None
        if k == 4:
            extra = ("ProductTypeD", ("rate", "AttributeType5"))  # typed member in timeslices
        tgt = market_files(m, BASE_ATTRS, prods + [newp], slice_extra=extra)
        out.append(("add_product", k,
                    f"Add finance product ProductTypeD with attribute12 to the {m} market.",
                    full, tgt))

        # delete_attribute: drop one attribute from the base entity.
        drop = BASE_ATTRS[k % len(BASE_ATTRS)]
        tgt = market_files(m, [a for a in BASE_ATTRS if a != drop], prods)
        out.append(("delete_attribute", k,
                    f"Remove attribute {drop[0]} from FinanceProductBase in the {m} market.",
                    full, tgt))

        # delete_product: remove the last product and its dependants.
        gone = prods[-1]["name"]
        tgt = market_files(m, BASE_ATTRS, prods[:-1])
        out.append(("delete_product", k,
                    f"Remove finance product {gone} from the {m} market.", full, tgt))
    return out


GRAMMAR = """\
entity ::= "entity" ["abstract"] Name ["extends" Name] "{" member* "}"
member ::= name ":" TypeName | name "=" Module "::" value
Comments start with //. Files live under server/, ui/ or timeslices/.
Members in timeslices/ files may only assign Module::value references.
Member types must be registered AttributeTypeN names or declared entities.
"""

SFT_TEMPLATE = "Instruction:\n{instruction}\n\nProject:\n{context}\n\nUpdated project:\n"
SFT_BAD_TEMPLATE = "Instruction:\n{instruction}\n\nProject:\n{context}\n\nUpdated project:"


def run(cli, *args, check=True):
    res = subprocess.run([str(cli), *map(str, args)], capture_output=True, text=True)
    if check and res.returncode != 0:
        sys.exit(f"{' '.join(map(str, args))} failed: {res.stderr}")
    return res


def main():
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    cli = Path(sys.argv[1]).resolve()
    all_tasks = tasks()

    # Toolchain-acceptance suite: the target of every task.
    acc = FIX / "acceptance"
    shutil.rmtree(acc, ignore_errors=True)
    acc.mkdir(parents=True)
    for op, k, _, _, tgt in all_tasks:
        (acc / f"{op}_{k}.json").write_text(json.dumps(nest(tgt), indent=2, sort_keys=True) + "\n")

    # Reference market and its golden stubs.
    market = FIX / "market"
    shutil.rmtree(market, ignore_errors=True)
    write_tree({k.split("/", 1)[1]: v for k, v in market_files(
        "alpen", BASE_ATTRS, standard_products(0)).items()}, market)
    golden = FIX / "golden"
    shutil.rmtree(golden, ignore_errors=True)
    golden.mkdir(parents=True)
    run(cli, "dslcheck", market, "--registry", REGISTRY, "--artifacts", golden / "stubs")

    # Corpus: four valid tasks of different operations, in distinct groups.
    chosen = [t for t in all_tasks
              if (t[0], t[1]) in {("create", 1), ("add_attribute", 2),
                                  ("delete_attribute", 3), ("delete_product", 1)}]
    corpus_dir = FIX / "corpus"
    shutil.rmtree(corpus_dir, ignore_errors=True)
    corpus_dir.mkdir(parents=True)
    corpus = corpus_dir / "corpus.jsonl"
    with tempfile.TemporaryDirectory() as tmp:
        for op, k, instr, ctx, tgt in chosen:
            base = Path(tmp) / f"{op}_{k}"
            write_tree(ctx, base / "context")
            write_tree(tgt, base / "target")
            (base / "context").mkdir(parents=True, exist_ok=True)
            run(cli, "dataset", "build", "--instruction", instr, "--context", base / "context",
                "--target", base / "target", "--operation", op, "--group", f"{op}-{k}",
                "--corpus", corpus)

    prompts = FIX / "prompts"
    shutil.rmtree(prompts, ignore_errors=True)
    prompts.mkdir(parents=True)
    (prompts / "grammar.txt").write_text(GRAMMAR)
    demo_op, demo_k, demo_instr, _, demo_tgt = next(
        t for t in all_tasks if (t[0], t[1]) == ("add_product", 1))
    (prompts / "demo.json").write_text(
        json.dumps({"instruction": demo_instr, "output": nest(demo_tgt)}, indent=2) + "\n")

    records = [json.loads(line) for line in corpus.read_text().splitlines() if line.strip()]
    ids = sorted(r["id"] for r in records)
    targets = {r["id"]: json.dumps(r["target"], sort_keys=True, separators=(",", ":"),
                                   ensure_ascii=False) for r in records}

    def near_miss(text):
        return text.replace("AttributeType16", "AttributeType15", 1)

    # Prediction files for eval.
    with open(corpus_dir / "predictions_perfect.jsonl", "w") as f:
        for i in ids:
            f.write(json.dumps({"id": i, "output": targets[i]}) + "\n")
    with open(corpus_dir / "predictions_half.jsonl", "w") as f:
        for n, i in enumerate(ids):
            out = targets[i] if n % 2 == 0 else near_miss(targets[i])
            f.write(json.dumps({"id": i, "output": out}) + "\n")

    # Replay archives keyed by prompt digest, per mode.
    for mode, extra in (("zero_shot", []),
                        ("one_shot", ["--grammar", prompts / "grammar.txt",
                                      "--demo", prompts / "demo.json"])):
        pfile = prompts / f"{mode}.jsonl"
        run(cli, "run", "--corpus", corpus, "--mode", mode, *extra, "--prompts-out", pfile)
        digests = {}
        for line in pfile.read_text().splitlines():
            rec = json.loads(line)
            digests[rec["id"]] = rec["digest"]
        with open(corpus_dir / f"replay_{mode}_perfect.jsonl", "w") as f:
            for i in ids:
                f.write(json.dumps({"digest": digests[i], "response": targets[i]}) + "\n")
        with open(corpus_dir / f"replay_{mode}_mixed.jsonl", "w") as f:
            for n, i in enumerate(ids):
                if n % 2 == 0:
                    resp = targets[i]
                else:
                    resp = "I could not produce the project." if n == 1 else '{"broken": '
                f.write(json.dumps({"digest": digests[i], "response": resp}) + "\n")
        first = json.loads(pfile.read_text().splitlines()[0])
        (golden / f"prompt_{mode}.txt").write_text(first["prompt"])

    # SFT templates and a golden record.
    sft = FIX / "sft"
    shutil.rmtree(sft, ignore_errors=True)
    sft.mkdir(parents=True)
    (sft / "template.txt").write_text(SFT_TEMPLATE)
    (sft / "bad_template.txt").write_text(SFT_BAD_TEMPLATE)
    res = run(cli, "dataset", "export-sft", "--corpus", corpus, "--template", sft / "template.txt",
              "--with-ids")
    (golden / "sft_first.json").write_text(res.stdout.splitlines()[0] + "\n")


if __name__ == "__main__":
    main()
