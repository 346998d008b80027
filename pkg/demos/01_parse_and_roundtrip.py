"""
Parsing a Resource Map and getting the same bytes back out
==========================================================

A Resource Map is an Atom feed: the feed identifies the aggregation,
the first rel="self" link identifies the map itself, and each entry
describes one aggregated resource.  Parse one, look around, serialize
it, and check the round trip loses nothing.
"""

from remcurator import parse_rem, serialize_rem, validate

ATOM = b"""<?xml version="1.0" encoding="utf-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <id>http://station.example/reading/aggregation</id>
  <link rel="self" href="http://station.example/reading/rem.atom"/>
  <title>Shorebird reading list</title>
  <author><name>R. Alvarez</name></author>
  <updated>2008-08-01T09:00:00Z</updated>
  <category scheme="http://www.openarchives.org/ore/terms/"
            term="http://www.openarchives.org/ore/terms/Aggregation"/>
  <entry>
    <id>tag:station.example,2008:logbook</id>
    <link rel="alternate" href="http://station.example/logbook" type="text/html"/>
    <title>Station logbook</title>
    <updated>2008-07-28T00:00:00Z</updated>
  </entry>
  <entry>
    <id>tag:station.example,2008:tides</id>
    <link rel="alternate" href="http://noaa.example/tides/8661070" type="text/html"/>
    <title>Tide predictions</title>
    <updated>2008-07-30T00:00:00Z</updated>
  </entry>
</feed>
"""

doc = parse_rem(ATOM)

print("resource map :", doc.rem_uri)
print("aggregation  :", doc.aggregation_uri)
print("title        :", doc.title)
print("authors      :", ", ".join(doc.authors))
for entry in doc.entries:
    print("entry        :", entry.entry_id, "->", entry.ar_uri)

# validate() returns problem strings; an empty list means the document
# honors the model rules (distinct URIs, absolute URIs, entry ids, ...)
problems = validate(doc)
print("problems     :", problems or "none")

# serialize, reparse, compare: the document survives the round trip
again = parse_rem(serialize_rem(doc))
print("round trip   :", "identical" if again == doc else "DIFFERS")
