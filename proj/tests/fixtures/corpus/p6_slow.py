def lookup_prices(orders, catalog_pairs):
    total = 0
    for name in orders:
        for key, price in catalog_pairs:
            if key == name:
                total += price
                break
    return total
