#!/usr/bin/env python3
"""Regenerates the bundled dataset CSVs, schema files, and descriptor catalogs.

Iris, Wine, and Breast Cancer Wisconsin ship as CSVs (sourced from
scikit-learn's copies of the UCI datasets). Seeds, Glass Identification,
and Ionosphere ship schema + catalog only; fetch the data from the UCI
repository (https://archive.ics.uci.edu) and convert with the same column
order as the schema.
"""

import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, ensure_ascii=False)
        f.write("\n")


def schema(dataset, features, target, templates, decimals=2):
    return {
        "dataset": dataset,
        "decimals": decimals,
        "features": features,
        "target": target,
        "templates": templates,
    }


def feat(name, template_id, kind="continuous", unit_phrase=""):
    return {"name": name, "kind": kind, "unit_phrase": unit_phrase,
            "template_id": template_id}


def catalog(dataset, entries):
    return {"dataset": dataset, "provenance": "bundled", "entries": entries}


# ---------------------------------------------------------------- iris

IRIS_FEATURES = ["Sepal Length", "Sepal Width", "Petal Length", "Petal Width"]

iris_templates = {
    "sepal_length": {"pattern": "The sepal length of the iris plant is {value}."},
    "sepal_width": {"pattern": "The sepal width of the iris plant is {value}."},
    "petal_length": {"pattern": "The petal length of the iris plant is {value}."},
    "petal_width": {"pattern": "The petal width of the iris plant is {value}."},
    "target": {"pattern": "The species of the iris plant is {value}."},
}

iris_schema = schema(
    "iris",
    [feat(n, t) for n, t in zip(IRIS_FEATURES,
                                ["sepal_length", "sepal_width",
                                 "petal_length", "petal_width"])],
    {"name": "species", "labels": ["setosa", "versicolor", "virginica"],
     "template_id": "target"},
    iris_templates,
)

iris_catalog = catalog("iris", {
    "Sepal Length": "Sepal Length: Unavailable",
    "Sepal Width": "Sepal Width: Unavailable",
    "Petal Length": "Petal Length: Unavailable",
    "Petal Width": "Petal Width: Unavailable",
})

# ---------------------------------------------------------------- wine

WINE_FEATURES = [
    ("Alcohol", "alcohol", "The alcohol content in the wine is {value}."),
    ("Malic acid", "malic_acid", "The level of malic acid in the wine is {value}."),
    ("Ash", "ash", "The ash content of the wine is {value}."),
    ("Alcalinity of ash", "alcalinity_of_ash",
     "The alcalinity of ash in the wine is {value}."),
    ("Magnesium", "magnesium", "The magnesium level in the wine is {value}."),
    ("Total phenols", "total_phenols",
     "The total phenols in the wine measure {value}."),
    ("Flavanoids", "flavanoids",
     "The flavanoids content in the wine is {value}."),
    ("Nonflavanoid phenols", "nonflavanoid_phenols",
     "The nonflavanoid phenols in the wine measure {value}."),
    ("Proanthocyanins", "proanthocyanins",
     "The proanthocyanins level in the wine is {value}."),
    ("Color Intensity", "color_intensity",
     "The color intensity of the wine is {value}."),
    ("Hue", "hue", "The hue of the wine is {value}."),
    ("OD280/OD315 of diluted wines", "od280_od315",
     "The OD280/OD315 of diluted wines is {value}."),
    ("Proline", "proline", "The proline content in the wine is {value}."),
]

wine_templates = {tid: {"pattern": pat} for _, tid, pat in WINE_FEATURES}
wine_templates["target"] = {
    "pattern": "The class of the wine is classified as {value}."}

wine_schema = schema(
    "wine",
    [feat(n, tid) for n, tid, _ in WINE_FEATURES],
    {"name": "class",
     "labels": ["class 1 wine", "class 2 wine", "class 3 wine"],
     "template_id": "target"},
    wine_templates,
)

wine_catalog = catalog("wine", {
    "Alcohol": "Alcohol content not provided for this wine sample.",
    "Malic acid": "Malic acid quantity missing for this wine sample.",
    "Ash": "Ash content data not recorded for this wine sample.",
    "Alcalinity of ash":
        "Alcalinity of ash information unavailable for this wine sample.",
    "Magnesium": "Magnesium level not specified for this wine sample.",
    "Total phenols": "Total phenols data missing for this wine sample.",
    "Flavanoids": "Flavanoids content not available for this wine sample.",
    "Nonflavanoid phenols":
        "Nonflavanoid phenols quantity not provided for this wine sample.",
    "Proanthocyanins": "Proanthocyanins data missing for this wine sample.",
    "Color Intensity":
        "Color intensity information not recorded for this wine sample.",
    "Hue": "Hue value not specified for this wine sample.",
    "OD280/OD315 of diluted wines":
        "OD280/OD315 data missing for this wine sample.",
    "Proline": "Proline content not available for this wine sample",
})

# ---------------------------------------------------------------- seeds

SEEDS_FEATURES = [
    ("Area", "area", "The area of the wheat kernel is {value}."),
    ("Perimeter", "perimeter", "The perimeter of the wheat kernel is {value}."),
    ("Compactness", "compactness",
     "The compactness of the wheat kernel is {value}."),
    ("Length of kernel", "kernel_length",
     "The length of the wheat kernel is {value}."),
    ("Width of kernel", "kernel_width",
     "The width of the wheat kernel is {value}."),
    ("Asymmetry coefficient", "asymmetry",
     "The asymmetry coefficient of the wheat kernel is {value}."),
    ("Length of kernel groove", "groove_length",
     "The length of the kernel groove is {value}."),
]

seeds_templates = {tid: {"pattern": pat} for _, tid, pat in SEEDS_FEATURES}
seeds_templates["target"] = {
    "pattern": "The variety of the wheat is {value}."}

seeds_schema = schema(
    "seeds",
    [feat(n, tid) for n, tid, _ in SEEDS_FEATURES],
    {"name": "variety", "labels": ["Kama", "Rosa", "Canadian"],
     "template_id": "target"},
    seeds_templates,
)

seeds_catalog = catalog("seeds", {
    "Area": "Kernel area not provided.",
    "Perimeter": "Kernel perimeter information missing.",
    "Compactness": "Kernel compactness data not recorded.",
    "Length of kernel": "Length of kernel data missing.",
    "Width of kernel": "Width of kernel data missing.",
    "Asymmetry coefficient": "Asymmetry coefficient information missing.",
    "Length of kernel groove": "Length of kernel groove information missing.",
})

# ---------------------------------------------------------------- glass

GLASS_FEATURES = [
    ("RI", "ri", "The refractive index of the glass is {value}.",
     "Refractive index not recorded for this glass sample."),
    ("Na", "na", "The sodium content of the glass is {value}.",
     "Sodium content missing for this glass sample."),
    ("Mg", "mg", "The magnesium content of the glass is {value}.",
     "Magnesium content missing for this glass sample."),
    ("Al", "al", "The aluminum content of the glass is {value}.",
     "Aluminum content missing for this glass sample."),
    ("Si", "si", "The silicon content of the glass is {value}.",
     "Silicon content missing for this glass sample."),
    ("K", "k", "The potassium content of the glass is {value}.",
     "Potassium content missing for this glass sample."),
    ("Ca", "ca", "The calcium content of the glass is {value}.",
     "Calcium content missing for this glass sample."),
    ("Ba", "ba", "The barium content of the glass is {value}.",
     "Barium content missing for this glass sample."),
    ("Fe", "fe", "The iron content of the glass is {value}.",
     "Iron content missing for this glass sample."),
]

glass_templates = {tid: {"pattern": pat} for _, tid, pat, _ in GLASS_FEATURES}
glass_templates["target"] = {"pattern": "The type of the glass is {value}."}

glass_schema = schema(
    "glass",
    [feat(n, tid) for n, tid, _, _ in GLASS_FEATURES],
    {"name": "type",
     "labels": ["building windows float processed",
                "building windows non-float processed",
                "vehicle windows float processed",
                "containers", "tableware", "headlamps"],
     "template_id": "target"},
    glass_templates,
)

glass_catalog = catalog("glass", {n: d for n, _, _, d in GLASS_FEATURES})

# ---------------------------------------------------------------- ionosphere

iono_features = []
iono_templates = {}
iono_entries = {}
for i in range(1, 35):
    name = f"Attribute {i}"
    tid = f"attr_{i:02d}"
    iono_features.append(feat(name, tid))
    iono_templates[tid] = {
        "pattern": f"The value of attribute {i} of the radar return is {{value}}."}
    iono_entries[name] = f"Attribute {i} reading missing for this radar return."
iono_templates["target"] = {"pattern": "The radar return is classified as {value}."}

iono_schema = schema(
    "ionosphere", iono_features,
    {"name": "class", "labels": ["good", "bad"], "template_id": "target"},
    iono_templates,
)

iono_catalog = catalog("ionosphere", iono_entries)

# ---------------------------------------------------------------- breast cancer


def make_cancer():
    from sklearn.datasets import load_breast_cancer
    ds = load_breast_cancer()
    features = []
    templates = {}
    entries = {}
    for name in ds.feature_names:
        tid = name.replace(" ", "_")
        features.append(feat(name, tid))
        templates[tid] = {
            "pattern": f"The {name} of the cell nuclei is {{value}}."}
        entries[name] = (f"{name[0].upper()}{name[1:]} measurement missing "
                         "for this biopsy sample.")
    templates["target"] = {"pattern": "The breast mass is diagnosed as {value}."}
    sch = schema(
        "breast_cancer", features,
        {"name": "diagnosis", "labels": ["malignant", "benign"],
         "template_id": "target"},
        templates,
    )
    cat = catalog("breast_cancer", entries)
    return ds, sch, cat


def write_csv(path, data, target, feature_header, target_name, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(feature_header + [target_name]) + "\n")
        for row, t in zip(data, target):
            cells = [repr(float(v)) for v in row]
            f.write(",".join(cells + [labels[int(t)]]) + "\n")


def main():
    os.makedirs(os.path.join(DATA, "schemas"), exist_ok=True)
    os.makedirs(os.path.join(DATA, "catalogs"), exist_ok=True)
    os.makedirs(os.path.join(DATA, "csv"), exist_ok=True)

    from sklearn.datasets import load_iris, load_wine

    cancer_ds, cancer_schema, cancer_catalog = make_cancer()

    for name, sch, cat in [
        ("iris", iris_schema, iris_catalog),
        ("wine", wine_schema, wine_catalog),
        ("seeds", seeds_schema, seeds_catalog),
        ("glass", glass_schema, glass_catalog),
        ("ionosphere", iono_schema, iono_catalog),
        ("breast_cancer", cancer_schema, cancer_catalog),
    ]:
        write_json(os.path.join(DATA, "schemas", f"{name}.schema.json"), sch)
        write_json(os.path.join(DATA, "catalogs", f"{name}.catalog.json"), cat)

    iris = load_iris()
    write_csv(os.path.join(DATA, "csv", "iris.csv"), iris.data, iris.target,
              IRIS_FEATURES, "species", ["setosa", "versicolor", "virginica"])

    wine = load_wine()
    write_csv(os.path.join(DATA, "csv", "wine.csv"), wine.data, wine.target,
              [n for n, _, _ in WINE_FEATURES], "class",
              ["class 1 wine", "class 2 wine", "class 3 wine"])

    write_csv(os.path.join(DATA, "csv", "breast_cancer.csv"),
              cancer_ds.data, cancer_ds.target,
              list(cancer_ds.feature_names), "diagnosis",
              ["malignant", "benign"])

    print("bundled data written to", os.path.abspath(DATA))


if __name__ == "__main__":
    main()
