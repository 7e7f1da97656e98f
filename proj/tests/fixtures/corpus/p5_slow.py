def count_hits(queries, allowed):
    hits = 0
    for q in queries:
        if q in allowed:  # allowed is a list
            hits += 1
    return hits
