def fetch(url):
    # guarded network round trip
    try:
        payload = get(url)
        status = 200
    except IOError:
        # degraded fallback path
        payload = None
        status = 503
    finally:
        close(url)
    return payload, status
