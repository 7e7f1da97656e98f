def count_multiples(n, k):
    return n // k
