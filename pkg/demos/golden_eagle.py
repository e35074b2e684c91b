"""
Meta-querying a punned ontology
===============================

GoldenEagle is a class (Harry is one) and also an individual (it is an
endangered species).  A single query can walk across both levels.
"""

from mserhkb import Variant, answer_query, parse_ontology, parse_query, split
from mserhkb.hybrid import ADMISSIBLE
from mserhkb.parser import format_axiom

ontology = parse_ontology("""
@prefix ex: <http://example.org/birds#> .
ex:Eagle isa ex:Bird .
ex:GoldenEagle isa ex:Eagle .
ex:GoldenEagle(ex:Harry) .
ex:EndangeredSpecies isa ex:Species .
ex:EndangeredSpecies(ex:GoldenEagle) .
""")

# instances, their classes, and the superclasses of those classes
query = parse_query("""
SELECT ?x ?y ?z WHERE { ?x rdf:type ?y . ?y rdfs:subClassOf ?z }
""")

# which names are used at two levels, and which axioms mention them
parts = split(ontology, Variant.NAT_CACT)
print("meta-elements:", sorted(parts.meta_elements))
birds = {"ex": "http://example.org/birds#"}
for axiom in (a for a in ontology.axioms if a in parts.clashing):
    print("  clashing:", format_axiom(axiom, birds))

# plain Datalog over everything, without trivial C subClassOf C rows
table = answer_query(ontology, query, Variant.E_AT, subsumption_reflexivity=False)
print(table.to_csv())

# each way of splitting the ontology between the two reasoners
for variant, fn in ADMISSIBLE:
    rows = answer_query(ontology, query, variant, fn, subsumption_reflexivity=False)
    print(f"{variant.value:>9} / {fn.value:<3} -> {len(rows)} rows")
