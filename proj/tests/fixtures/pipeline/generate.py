"""Regenerates the pipeline fixture: manifest, reference graphs, replies, regions, images."""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
NEURON = json.loads((HERE.parent / "neuron.kg.json").read_text())

SMALL = {
    "Visual Components": {
        "elements": ["sun", "water", "evaporation", "cloud"],
        "dependencies": [
            "Causes(sun, evaporation)",
            "Requires(evaporation, water)",
            "TemporalOrder(evaporation, cloud)",
        ],
    }
}

CHANGE = {
    "Visual Components": {
        "elements": ["price", "demand", "supply"],
        "dependencies": [
            "Causes(increase(demand), increase(price))",
            "Causes(increase(supply), decrease(price))",
        ],
    }
}

# id, level, discipline, model, kg, false entities, false deps, region count
ITEMS = [
    ("neuron-preschool", "preschool", "biology", "model-a", NEURON,
     {"schwann cell", "node of ranvier"},
     {"Contains(myelin sheath, schwann cell)", "Contains(axon, node of Ranvier)"}, 115),
    ("water-primary", "primary", "geography", "model-a", SMALL, set(), set(), 50),
    ("market-secondary", "secondary", "economics", "model-a", CHANGE, {"supply"},
     {"Causes(increase(supply), decrease(price))"}, 160),
    ("neuron-high", "high", "biology", "model-b", NEURON, set(), set(), 70),
    ("water-undergrad", "undergrad", "geography", "model-b", SMALL, {"cloud", "water"},
     {"Requires(evaporation, water)", "TemporalOrder(evaporation, cloud)"}, 40),
    ("market-phd", "phd", "economics", "model-b", CHANGE, set(),
     {"Causes(increase(demand), increase(price))"}, 136),
]

# 1x1 PNG; grounding replies are canned, so pixels never matter.
PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d4948445200000001000000010806000000"
    "1f15c4890000000d49444154789c6360000002000001e221bc330000000049454e44ae426082"
)


def reply(kg, false_entities, false_deps):
    lines = ["{", "  Image_Description: A labelled diagram.", "  Element_and_Dependency_Analysis: {",
             "    Element_Evaluation: {"]
    for e in kg["Visual Components"]["elements"]:
        lines.append(f"      {e}: {'no' if e in false_entities else 'yes'}")
    lines += ["    },", "    Dependency_Evaluation: {"]
    for d in kg["Visual Components"]["dependencies"]:
        verdict = "no" if d in false_deps else "yes"
        lines.append(f"      {d}: [{verdict}]  [Judged from the drawing.]")
    lines += ["    }", "  }", "}"]
    return "\n".join(lines) + "\n"


def regions(count):
    # Disjoint 8x8 boxes on a 20-wide grid, so every box is its own group.
    out = []
    for i in range(count):
        x, y = (i % 20) * 10, (i // 20) * 10
        out.append({"kind": "mask" if i % 3 else "text", "bbox": [x, y, 8, 8], "area": 64 - i % 5})
    return {"image": {"width": 200, "height": 200},
            "producer": {"model": "synthetic-grid", "points_per_side": 32, "nms_iou": 0.6},
            "regions": out}


def main():
    for sub in ("kg", "replies", "images"):
        (HERE / sub).mkdir(exist_ok=True)
    lines = []
    for item_id, level, discipline, model, kg, fe, fd, n in ITEMS:
        (HERE / "kg" / f"{item_id}.json").write_text(json.dumps(kg, indent=2) + "\n")
        (HERE / "replies" / f"{item_id}.txt").write_text(reply(kg, fe, fd))
        (HERE / "images" / f"{item_id}.png").write_bytes(PNG)
        (HERE / "images" / f"{item_id}.png.regions.json").write_text(json.dumps(regions(n)) + "\n")
        lines.append(json.dumps({
            "id": item_id, "prompt": f"Draw {item_id}.", "education_level": level,
            "discipline": discipline, "model": model, "kg": f"kg/{item_id}.json",
            "generated_image_path": f"images/{item_id}.png"}))
    (HERE / "manifest.ndjson").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
