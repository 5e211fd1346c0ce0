# Приложение pointgr: графовая остаточная сеть для облаков точек
