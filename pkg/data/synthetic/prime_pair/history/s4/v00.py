a,b = input().split(",")
x = int(a[::-1])
y = int(b[::-1])
def prime(z):
    if z < 2:
        return False
    for i in range(2, z):
        if z % i == 0:
            return False
    return True
if prime(x) and prime(y):
    print(x + y)
elif prime(x) or prime(y)
    print(a + b)
else:
    print(a * b)
