a, b = map(int, input().split(','))
def is_prime(v):
    if v < 2:
        return False
    return all(v % d for d in range(2, int(v ** 0.5) + 1))
x = int(str(a)[::-1])
y = int(str(b)[::-1])
if is_prime(x) and is_prime(y):
    print(x + y)
elif is_prime(x) or is_prime(y):
    print(a + b)
else:
    print(a * b)
